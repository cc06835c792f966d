//! Numerical checks of the smoothing inequalities, each returning a [`CheckReport`].

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::report::CheckReport;
use crate::error::{ensure_finite, ensure_positive, Error, Result};
use crate::gbpa::GameTrace;
use crate::potentials::{DecisionSet, Norm};
use crate::rng::{map_gaussian_blocks, GaussianDraws, NoiseStream, Purpose};
use crate::smoothing::{GaussianPotential, GaussianSmoothingConfig, HessianForm, SmoothedPotential};
use crate::stats::{quadrature_sum, Moments};

/// Tolerance for finite differences of closed-form potentials.
pub const CLOSED_FORM_FD_TOLERANCE: f64 = 1e-6;

/// Groups sub-checks; `measured` is the number of failing children.
pub fn group(name: impl Into<String>, subs: Vec<CheckReport>) -> CheckReport {
    let failing = subs.iter().filter(|s| !s.passed()).count();
    CheckReport::new(name, failing as f64, 0.0, 0.0).with_sub(subs)
}

fn gaussian(set: DecisionSet, eta: f64, samples: usize, seed: u64) -> Result<GaussianPotential> {
    GaussianPotential::from_config(&set, &GaussianSmoothingConfig::new(eta, samples, seed)?)
}

fn check_dim(set: &DecisionSet, v: &[f64]) -> Result<()> {
    set.check_input(v)
}

/// Quadratic form `vᵀ∇²f(x)v` with its standard error.
fn curvature(potential: &SmoothedPotential, x: &[f64], v: &[f64]) -> Result<(f64, f64)> {
    let w = DMatrix::from_fn(v.len(), v.len(), |i, j| v[i] * v[j]);
    match potential {
        SmoothedPotential::GaussianMc(p) => {
            let est = p.hessian_functional(x, HessianForm::GradientForm, &w)?;
            Ok((est.value, est.std_error))
        }
        _ => {
            let h = potential.hessian(x, HessianForm::GradientForm)?.symmetrized;
            Ok((h.component_mul(&w).sum(), 0.0))
        }
    }
}

/// `a‖v‖²/2 ≤ D_f(θ + v, θ) ≤ b‖v‖²/2`, where `a, b` are the smallest and
/// largest curvature `vᵀ∇²f v / ‖v‖²` over `segment_samples` evenly spaced
/// points of the segment from `θ` to `θ + v`.
///
/// Closed forms carry a floating-point error bar of a few ulps of the terms
/// in the divergence instead of a sampling error.
pub fn check_bregman_sandwich(
    potential: &SmoothedPotential,
    theta: &[f64],
    v: &[f64],
    segment_samples: usize,
) -> Result<CheckReport> {
    if segment_samples < 2 {
        return Err(Error::InvalidParameter("segment_samples must be at least 2".into()));
    }
    let set = potential.decision_set(theta.len())?;
    check_dim(&set, theta)?;
    check_dim(&set, v)?;
    let y: Vec<f64> = theta.iter().zip(v).map(|(a, b)| a + b).collect();
    let d = potential.bregman(&y, theta)?;
    let d_se = if potential.is_exact() {
        let fy = potential.value(&y)?.value;
        let fx = potential.value(theta)?.value;
        4.0 * f64::EPSILON * (fy.abs() + fx.abs() + (fy - fx - d.value).abs())
    } else {
        d.std_error
    };
    let mut lo = (f64::INFINITY, 0.0);
    let mut hi = (f64::NEG_INFINITY, 0.0);
    let mut point = vec![0.0; theta.len()];
    for k in 0..segment_samples {
        let s = k as f64 / (segment_samples - 1) as f64;
        for ((p, a), b) in point.iter_mut().zip(theta).zip(v) {
            *p = a + s * b;
        }
        let (q, se) = curvature(potential, &point, v)?;
        if q < lo.0 {
            lo = (q, se);
        }
        if q > hi.0 {
            hi = (q, se);
        }
    }
    let lower = CheckReport::new("lower", 0.5 * lo.0, d.value, quadrature_sum([0.5 * lo.1, d_se]));
    let config = json!({
        "theta": theta,
        "v": v,
        "segment_samples": segment_samples,
        "eta": potential.eta(),
        "divergence": d.value,
        "min_curvature": lo.0,
        "max_curvature": hi.0,
    });
    Ok(CheckReport::new("bregman_sandwich", d.value, 0.5 * hi.0, quadrature_sum([0.5 * hi.1, d_se]))
        .with_config(config)
        .with_sub(vec![lower]))
}

/// `Σ_ij |H_ij| ≤ 2√(2 ln N)/η` for Gaussian smoothing on the simplex, plus
/// the structural facts used to prove it: the entries sum to zero, the
/// diagonal is non-negative and the off-diagonal entries are non-positive.
pub fn check_hessian_experts_bound(
    n: usize,
    theta: &[f64],
    eta: f64,
    samples: usize,
    seed: u64,
) -> Result<CheckReport> {
    let pot = gaussian(DecisionSet::simplex(n)?, eta, samples, seed)?;
    let h = pot.hessian(theta, HessianForm::GradientForm)?;
    let signs = h.raw.map(|x| if x > 0.0 { 1.0 } else if x < 0.0 { -1.0 } else { 0.0 });
    let abs_sum = pot.hessian_functional(theta, HessianForm::GradientForm, &signs)?;
    let total = pot.hessian_functional(theta, HessianForm::GradientForm, &DMatrix::from_element(n, n, 1.0))?;
    let bound = 2.0 * (2.0 * (n as f64).ln()).sqrt() / eta;

    let mut diagonal = Vec::with_capacity(n);
    let mut off_diagonal = Vec::with_capacity(n * n.saturating_sub(1));
    for i in 0..n {
        for j in 0..n {
            let (x, se) = (h.raw[(i, j)], h.raw_std_error[(i, j)]);
            if i == j {
                diagonal.push(CheckReport::new(format!("h[{i}][{i}]>=0"), -x, 0.0, se));
            } else {
                off_diagonal.push(CheckReport::new(format!("h[{i}][{j}]<=0"), x, 0.0, se));
            }
        }
    }
    let subs = vec![
        CheckReport::two_sided("entry_sum", total.value, 0.0, total.std_error),
        group("diagonal", diagonal),
        group("off_diagonal", off_diagonal),
    ];
    Ok(CheckReport::new("hessian_experts_bound", abs_sum.value, bound, abs_sum.std_error)
        .with_config(json!({"n": n, "theta": theta, "eta": eta, "samples": samples, "seed": seed}))
        .with_sub(subs))
}

/// Largest eigenvalue of the symmetrized Hessian estimate and its standard
/// error (delta method along the estimated top eigenvector).
pub fn max_eigenvalue(pot: &GaussianPotential, theta: &[f64]) -> Result<(f64, f64)> {
    let h = pot.hessian(theta, HessianForm::GradientForm)?;
    let (lambda, v) = h.max_eigen();
    let w = DMatrix::from_fn(v.len(), v.len(), |i, j| v[i] * v[j]);
    let se = pot.hessian_functional(theta, HessianForm::GradientForm, &w)?.std_error;
    Ok((lambda, se))
}

/// `λ_max(∇²Φ̃) ≤ 1/(η√N)` on the unit ball, and the origin having the
/// largest curvature: `λ_max(0) ≥ λ_max(r·d)` for `r ∈ {1, 5}` along the
/// direction of `theta` (or the first axis when `theta = 0`).
pub fn check_hessian_l2_bound(n: usize, theta: &[f64], eta: f64, samples: usize, seed: u64) -> Result<CheckReport> {
    let set = DecisionSet::l2_ball(n)?;
    check_dim(&set, theta)?;
    let pot = gaussian(set, eta, samples, seed)?;
    let (lambda, se) = max_eigenvalue(&pot, theta)?;
    let norm = Norm::L2.of(theta);
    let dir: Vec<f64> = if norm > 0.0 {
        theta.iter().map(|x| x / norm).collect()
    } else {
        (0..n).map(|i| if i == 0 { 1.0 } else { 0.0 }).collect()
    };
    let origin = pot.set().dim();
    let (l0, se0) = if norm == 0.0 { (lambda, se) } else { max_eigenvalue(&pot, &vec![0.0; origin])? };
    let mut subs = Vec::new();
    for r in [1.0, 5.0] {
        let point: Vec<f64> = dir.iter().map(|x| r * x).collect();
        let (lr, ser) = max_eigenvalue(&pot, &point)?;
        subs.push(
            CheckReport::new(format!("origin_vs_radius_{r}"), lr - l0, 0.0, quadrature_sum([se0, ser]))
                .with_config(json!({"origin": l0, "radius": r, "at_radius": lr})),
        );
    }
    Ok(CheckReport::new("hessian_l2_bound", lambda, 1.0 / (eta * (n as f64).sqrt()), se)
        .with_config(json!({"n": n, "theta": theta, "eta": eta, "samples": samples, "seed": seed}))
        .with_sub(subs))
}

/// `E[max_i u_i] ≤ √(2 ln N)` for `N` independent standard normals.
pub fn check_max_gaussian(n: usize, samples: usize, seed: u64) -> Result<CheckReport> {
    if n == 0 || samples == 0 {
        return Err(Error::InvalidParameter("N and samples must be at least 1".into()));
    }
    let stream = NoiseStream::new(seed).purpose(Purpose::Check);
    let parts = map_gaussian_blocks(stream, samples, n, |block| {
        block
            .chunks_exact(n)
            .map(|u| u.iter().copied().fold(f64::NEG_INFINITY, f64::max))
            .collect::<Moments>()
    });
    let m = parts.iter().fold(Moments::new(), |mut acc, p| {
        acc.merge(p);
        acc
    });
    Ok(CheckReport::new("max_gaussian", m.mean(), (2.0 * (n as f64).ln()).sqrt(), m.std_error())
        .with_config(json!({"n": n, "samples": samples, "seed": seed})))
}

/// `Σ_t Φ̃(Θ_{t−1}; η_t) − Φ̃(Θ_{t−1}; η_{t−1}) ≤ η_T E[Φ(u)]` with `η_0 = 0`
/// (so the first term compares against `Φ`), all terms on one draw set.
///
/// Per draw the inequality holds exactly by sublinearity of `Φ`, so the
/// standard error is that of the per-draw difference.
pub fn check_overestimation_telescope(trace: &GameTrace, samples: usize, seed: u64) -> Result<CheckReport> {
    let etas = trace.etas();
    if let Some(t) = (1..etas.len()).find(|&t| etas[t] < etas[t - 1]) {
        return Err(Error::InvalidParameter(format!("eta decreases at round {}", t + 1)));
    }
    ensure_finite(&etas, "eta sequence")?;
    if etas.iter().any(|&e| e <= 0.0) {
        return Err(Error::InvalidParameter("eta must be positive".into()));
    }
    if samples == 0 {
        return Err(Error::InvalidParameter("samples must be at least 1".into()));
    }
    let set = &trace.set;
    let n = set.dim();
    let eta_t = etas.last().copied().unwrap_or(0.0);
    let draws = GaussianDraws::generate(NoiseStream::new(seed).purpose(Purpose::Check), samples, n);
    let previous: Vec<Vec<f64>> = (1..=trace.horizon()).map(|t| trace.previous_cumulative(t)).collect();
    let parts = draws.map_blocks(|block| {
        let mut acc = [Moments::new(), Moments::new(), Moments::new()];
        let mut a = vec![0.0; n];
        let mut b = vec![0.0; n];
        for u in block.chunks_exact(n) {
            let mut sum = 0.0;
            let mut last = 0.0;
            for (cum, &eta) in previous.iter().zip(&etas) {
                for i in 0..n {
                    a[i] = cum[i] + eta * u[i];
                    b[i] = cum[i] + last * u[i];
                }
                sum += set.support(&a) - set.support(&b);
                last = eta;
            }
            let bound = eta_t * set.support(u);
            acc[0].push(sum);
            acc[1].push(bound);
            acc[2].push(sum - bound);
        }
        acc
    });
    let mut acc = [Moments::new(), Moments::new(), Moments::new()];
    for p in &parts {
        for (x, y) in acc.iter_mut().zip(p) {
            x.merge(y);
        }
    }
    Ok(CheckReport::new("overestimation_telescope", acc[0].mean(), acc[1].mean(), acc[2].std_error())
        .with_config(json!({
            "horizon": trace.horizon(),
            "eta_final": eta_t,
            "samples": samples,
            "seed": seed,
            "root_seed": trace.root_seed,
        })))
}

/// Smoothing parameters `(α, β, ‖·‖)`: `α` bounds `|f_η − Φ| / η` and `β`
/// makes `f_η` `(β/η)`-strongly smooth.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SmoothingCertificate {
    pub alpha: f64,
    pub beta: f64,
    pub norm: Norm,
    pub eta: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificateEstimate {
    pub certificate: SmoothingCertificate,
    pub alpha_std_error: f64,
    pub beta_std_error: f64,
}

/// `count` seeded Gaussian directions, each at radii 1 and 10, plus the origin.
pub fn probe_points(dim: usize, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = NoiseStream::new(seed).purpose(Purpose::Probe).rng();
    let mut out = vec![vec![0.0; dim]];
    for _ in 0..count {
        let g: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
        let norm = Norm::L2.of(&g).max(f64::MIN_POSITIVE);
        for r in [1.0, 10.0] {
            out.push(g.iter().map(|x| r * x / norm).collect());
        }
    }
    out
}

/// Measures `α` over the probe points and `β` over pairs `(x, x + s·d)` with
/// a seeded unit direction `d` per probe and `s ∈ {0.1η, η}`.
pub fn estimate_certificate(
    potential: &SmoothedPotential,
    norm: Norm,
    probe_count: usize,
    seed: u64,
) -> Result<CertificateEstimate> {
    let eta = potential
        .eta()
        .ok_or_else(|| Error::InvalidParameter("the baseline potential has no smoothing scale".into()))?;
    let dim = match potential {
        SmoothedPotential::GaussianMc(p) => p.set().dim(),
        _ => return Err(Error::InvalidParameter("closed-form certificates need an explicit dimension".into())),
    };
    estimate_certificate_in(potential, dim, eta, norm, probe_count, seed)
}

fn estimate_certificate_in(
    potential: &SmoothedPotential,
    dim: usize,
    eta: f64,
    norm: Norm,
    probe_count: usize,
    seed: u64,
) -> Result<CertificateEstimate> {
    let set = potential.decision_set(dim)?;
    let probes = probe_points(dim, probe_count, seed);
    let mut rng = NoiseStream::new(seed).purpose(Purpose::Probe).derive(1).rng();
    let mut alpha = (f64::NEG_INFINITY, 0.0);
    let mut beta = (f64::NEG_INFINITY, 0.0);
    for x in &probes {
        let f = potential.value(x)?;
        let dev = (f.value - set.support(x)).abs() / eta;
        if dev > alpha.0 {
            alpha = (dev, f.std_error / eta);
        }
        let g: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
        let gn = norm.of(&g).max(f64::MIN_POSITIVE);
        for s in [0.1 * eta, eta] {
            let y: Vec<f64> = x.iter().zip(&g).map(|(a, b)| a + s * b / gn).collect();
            let step = norm.of(&y.iter().zip(x).map(|(a, b)| a - b).collect::<Vec<_>>());
            let d = potential.bregman(&y, x)?;
            let k = 2.0 * eta / (step * step);
            if k * d.value > beta.0 {
                beta = (k * d.value, k * d.std_error);
            }
        }
    }
    Ok(CertificateEstimate {
        certificate: SmoothingCertificate { alpha: alpha.0.max(0.0), beta: beta.0.max(0.0), norm, eta },
        alpha_std_error: alpha.1,
        beta_std_error: beta.1,
    })
}

/// Gaussian smoothing of an `L`-Lipschitz support function is an
/// `η`-smoothing with parameters `(L√N, L, ‖·‖₂)`.
pub fn check_generic_smoothing(
    set: &DecisionSet,
    eta: f64,
    samples: usize,
    probe_count: usize,
    seed: u64,
) -> Result<(SmoothingCertificate, CheckReport)> {
    ensure_positive(eta, "eta")?;
    let lipschitz = set.lipschitz_constant(Norm::L2);
    let n = set.dim() as f64;
    let pot = SmoothedPotential::GaussianMc(gaussian(set.clone(), eta, samples, seed)?);
    let est = estimate_certificate(&pot, Norm::L2, probe_count, seed)?;
    let c = est.certificate;
    let report = group(
        "generic_smoothing",
        vec![
            CheckReport::new("alpha", c.alpha, lipschitz * n.sqrt(), est.alpha_std_error),
            CheckReport::new("beta", c.beta, lipschitz, est.beta_std_error),
        ],
    )
    .with_config(json!({
        "set": set,
        "eta": eta,
        "samples": samples,
        "probe_count": probe_count,
        "seed": seed,
        "lipschitz": lipschitz,
    }));
    Ok((c, report))
}

/// Measured certificates in `‖·‖∞` for the two experts potentials at the same
/// scale: Gaussian smoothing first, then the entropic (Hedge) potential.
pub fn experts_certificates(
    n: usize,
    eta: f64,
    samples: usize,
    probe_count: usize,
    seed: u64,
) -> Result<[CertificateEstimate; 2]> {
    let gauss = SmoothedPotential::GaussianMc(gaussian(DecisionSet::simplex(n)?, eta, samples, seed)?);
    let hedge = SmoothedPotential::EntropicFtrl { eta };
    Ok([
        estimate_certificate_in(&gauss, n, eta, Norm::Linf, probe_count, seed)?,
        estimate_certificate_in(&hedge, n, eta, Norm::Linf, probe_count, seed)?,
    ])
}

/// Central differences of the value against the reported gradient: within
/// 1e-6 for closed forms, within 3 combined standard errors (common draws)
/// for Monte Carlo potentials. The Monte Carlo error also carries the
/// rounding error of the difference quotient, which dominates when the
/// potential is linear and the sampling error vanishes.
pub fn check_gradient_fd(potential: &SmoothedPotential, theta: &[f64], step: f64) -> Result<CheckReport> {
    ensure_positive(step, "finite-difference step")?;
    let set = potential.decision_set(theta.len())?;
    check_dim(&set, theta)?;
    let grad = potential.gradient(theta)?;
    let mut subs = Vec::with_capacity(theta.len());
    let mut plus = theta.to_vec();
    let mut minus = theta.to_vec();
    for i in 0..theta.len() {
        plus[i] = theta[i] + step;
        minus[i] = theta[i] - step;
        let sub = match potential {
            SmoothedPotential::GaussianMc(p) => {
                let d = p.difference(&plus, &minus)?;
                let fd = d.value / (2.0 * step);
                let scale = p.value(&plus)?.value.abs() + p.value(&minus)?.value.abs();
                let rounding = 4.0 * f64::EPSILON * scale / (2.0 * step);
                let se = quadrature_sum([d.std_error / (2.0 * step), grad.std_error[i], rounding]);
                CheckReport::new(format!("coordinate_{i}"), (fd - grad.mean[i]).abs(), 0.0, se)
            }
            _ => {
                let fd = (potential.value(&plus)?.value - potential.value(&minus)?.value) / (2.0 * step);
                CheckReport::new(format!("coordinate_{i}"), (fd - grad.mean[i]).abs(), CLOSED_FORM_FD_TOLERANCE, 0.0)
            }
        };
        subs.push(sub);
        plus[i] = theta[i];
        minus[i] = theta[i];
    }
    Ok(group("gradient_fd", subs).with_config(json!({"theta": theta, "step": step, "eta": potential.eta()})))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gbpa::{run_game, AdversaryConfig, AdversaryKind, PotentialSpec};
    use crate::smoothing::EtaSchedule;

    #[test]
    fn sandwich_on_hedge() {
        let p = SmoothedPotential::EntropicFtrl { eta: 1.0 };
        let r = check_bregman_sandwich(&p, &[0.0, 0.0], &[1.0, -1.0], 33).unwrap();
        assert!(r.passed());
        assert!(r.margin() < 0.0);
        assert!(r.sub[0].margin() < 0.0);
    }

    #[test]
    fn sandwich_with_zero_step_is_tight() {
        let p = SmoothedPotential::EntropicFtrl { eta: 0.5 };
        let r = check_bregman_sandwich(&p, &[0.3, -0.1, 0.2], &[0.0; 3], 5).unwrap();
        assert_eq!(r.measured, 0.0);
        assert_eq!(r.bound, 0.0);
        assert!(r.passed());
    }

    #[test]
    fn sandwich_inside_quadratic_region_is_exact() {
        let eta = 4.0;
        let p = SmoothedPotential::QuadraticFtrl { eta };
        let v = [0.5, -1.0];
        let r = check_bregman_sandwich(&p, &[1.0, 0.5], &v, 9).unwrap();
        let expected = (0.25 + 1.0) / (2.0 * eta);
        assert!((r.measured - expected).abs() < 1e-15);
        assert!((r.bound - expected).abs() < 1e-15);
        assert!(r.passed());
    }

    #[test]
    fn sandwich_for_monte_carlo_potential() {
        let set = DecisionSet::simplex(3).unwrap();
        let p = SmoothedPotential::GaussianMc(gaussian(set, 1.0, 20_000, 3).unwrap());
        let r = check_bregman_sandwich(&p, &[0.2, 0.0, -0.3], &[0.5, -0.5, 0.2], 9).unwrap();
        assert!(r.passed(), "{r:?}");
    }

    #[test]
    fn experts_hessian_two_experts() {
        let r = check_hessian_experts_bound(2, &[0.0, 0.0], 1.0, 100_000, 1).unwrap();
        assert!((r.bound - 2.0 * (2.0 * 2f64.ln()).sqrt()).abs() < 1e-12);
        let truth = 2.0 / std::f64::consts::PI.sqrt();
        assert!((r.measured - truth).abs() < 3.0 * r.std_error, "{} vs {truth}", r.measured);
        assert!(r.passed());
    }

    #[test]
    fn experts_hessian_scales_inversely_with_eta() {
        let theta = [0.5, -0.2, 0.1, 0.0, -1.0];
        let a = check_hessian_experts_bound(5, &theta, 1.0, 50_000, 7).unwrap();
        let scaled: Vec<f64> = theta.iter().map(|x| x * 10.0).collect();
        let b = check_hessian_experts_bound(5, &scaled, 10.0, 50_000, 7).unwrap();
        // Same draws and Θ/η, so the estimates scale exactly.
        assert!((b.measured / a.measured - 0.1).abs() < 1e-9);
    }

    #[test]
    fn l2_hessian_one_dimension() {
        let r = check_hessian_l2_bound(1, &[0.0], 1.0, 100_000, 2).unwrap();
        let truth = (2.0 / std::f64::consts::PI).sqrt();
        assert!((r.measured - truth).abs() < 3.0 * r.std_error);
        assert_eq!(r.bound, 1.0);
        assert!(r.passed());
    }

    #[test]
    fn l2_hessian_bound_value() {
        let r = check_hessian_l2_bound(4, &[0.0; 4], 2.0, 20_000, 3).unwrap();
        assert_eq!(r.bound, 0.25);
    }

    #[test]
    fn max_gaussian_cases() {
        let r = check_max_gaussian(1, 100_000, 1).unwrap();
        assert_eq!(r.bound, 0.0);
        assert!(r.passed());
        let r = check_max_gaussian(2, 100_000, 2).unwrap();
        assert!((r.measured - 1.0 / std::f64::consts::PI.sqrt()).abs() < 3.0 * r.std_error);
        assert!(r.passed());
    }

    #[test]
    fn telescope_constant_schedule_is_equality() {
        let set = DecisionSet::simplex(4).unwrap();
        let adv = AdversaryConfig::new(AdversaryKind::IidRademacher { seed: 1 }, 1.0);
        let trace = run_game(&set, PotentialSpec::EntropicFtrl, EtaSchedule::Fixed { eta: 2.0 }, &adv, 20, 1).unwrap();
        let r = check_overestimation_telescope(&trace, 5000, 4).unwrap();
        assert!((r.measured - r.bound).abs() < 1e-12);
        assert!(r.passed());
    }

    #[test]
    fn telescope_adaptive_and_empty() {
        let set = DecisionSet::simplex(5).unwrap();
        let adv = AdversaryConfig::new(AdversaryKind::IidRademacher { seed: 2 }, 1.0);
        let trace = run_game(&set, PotentialSpec::EntropicFtrl, EtaSchedule::AdaptiveExperts, &adv, 50, 2).unwrap();
        let r = check_overestimation_telescope(&trace, 5000, 5).unwrap();
        assert!(r.passed());
        assert!(r.measured <= r.bound);

        let empty = GameTrace { rounds: vec![], ..trace.clone() };
        let r = check_overestimation_telescope(&empty, 100, 5).unwrap();
        assert_eq!((r.measured, r.bound), (0.0, 0.0));
        assert!(r.passed());

        let mut decreasing = trace;
        decreasing.rounds[3].eta = 0.1;
        assert!(check_overestimation_telescope(&decreasing, 100, 5).is_err());
    }

    #[test]
    fn generic_certificates() {
        for set in [DecisionSet::simplex(4).unwrap(), DecisionSet::l2_ball(4).unwrap()] {
            let (c, r) = check_generic_smoothing(&set, 1.0, 5000, 8, 3).unwrap();
            assert!(r.passed(), "{r:?}");
            assert!(c.alpha >= 0.0 && c.beta >= 0.0);
        }
    }

    #[test]
    fn alpha_is_scale_free() {
        let set = DecisionSet::l2_ball(3).unwrap();
        let (a, _) = check_generic_smoothing(&set, 1.0, 4000, 4, 9).unwrap();
        let (b, _) = check_generic_smoothing(&set, 2.0, 4000, 4, 9).unwrap();
        // At the origin Φ̃ − Φ = η E‖u‖ on shared draws; it dominates both maxima.
        assert!((a.alpha - b.alpha).abs() < 1e-12);
    }

    #[test]
    fn hedge_certificate_is_within_known_constants() {
        let [gauss, hedge] = experts_certificates(4, 1.0, 4000, 6, 1).unwrap();
        assert!(hedge.certificate.alpha <= 4f64.ln() + 1e-12);
        assert!(hedge.certificate.beta <= 1.0 + 1e-12);
        assert!(gauss.certificate.alpha > 0.0);
    }

    #[test]
    fn gradient_fd_closed_forms() {
        let r = check_gradient_fd(&SmoothedPotential::EntropicFtrl { eta: 0.7 }, &[0.3, -1.2, 0.8], 1e-5).unwrap();
        assert!(r.passed(), "{r:?}");
        let r = check_gradient_fd(&SmoothedPotential::QuadraticFtrl { eta: 2.0 }, &[0.3, -1.2], 1e-5).unwrap();
        assert!(r.passed());
    }

    #[test]
    fn quadratic_boundary_one_sided_differences() {
        let eta = 5.0;
        let p = SmoothedPotential::QuadraticFtrl { eta };
        let theta = [3.0, 4.0];
        let g = p.gradient(&theta).unwrap().mean;
        let h = 1e-7;
        for i in 0..2 {
            let mut fwd = theta;
            fwd[i] += h;
            let mut bwd = theta;
            bwd[i] -= h;
            let f0 = p.value(&theta).unwrap().value;
            let forward = (p.value(&fwd).unwrap().value - f0) / h;
            let backward = (f0 - p.value(&bwd).unwrap().value) / h;
            assert!((forward - g[i]).abs() < 1e-6);
            assert!((backward - g[i]).abs() < 1e-6);
        }
        assert!(check_gradient_fd(&p, &theta, 1e-7).unwrap().passed());
    }

    #[test]
    fn gradient_fd_monte_carlo() {
        let set = DecisionSet::simplex(3).unwrap();
        let p = SmoothedPotential::GaussianMc(gaussian(set, 1.0, 20_000, 8).unwrap());
        let r = check_gradient_fd(&p, &[0.4, -0.3, 0.1], 1e-3).unwrap();
        assert!(r.passed(), "{r:?}");
    }
}
