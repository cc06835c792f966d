//! Gaussian stochastic smoothing `Φ̃(Θ; η) = E[Φ(Θ + ηu)]`, `u ~ N(0, I)`.
//!
//! A [`GaussianPotential`] owns one fixed set of perturbation draws. All of
//! its evaluations reuse those draws, so differences between evaluation
//! points (Bregman terms, finite differences, η changes) are computed with
//! common random numbers.

use std::sync::Arc;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::{GradientEstimate, HessianEstimate, HessianForm, PotentialEstimate};
use crate::error::{ensure_positive, Error, Result};
use crate::potentials::{DecisionSet, Leader};
use crate::rng::{GaussianDraws, NoiseStream, Purpose};
use crate::stats::Moments;

/// Default Monte Carlo budget per evaluation.
pub const DEFAULT_SAMPLES: usize = 10_000;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Covariance {
    /// `Σ = I`. Other covariances are not implemented.
    #[default]
    Identity,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaussianSmoothingConfig {
    pub eta: f64,
    #[serde(default)]
    pub covariance: Covariance,
    pub samples: usize,
    pub seed: u64,
}

impl GaussianSmoothingConfig {
    pub fn new(eta: f64, samples: usize, seed: u64) -> Result<Self> {
        let cfg = Self { eta, covariance: Covariance::Identity, samples, seed };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        ensure_positive(self.eta, "eta")?;
        if self.samples == 0 {
            return Err(Error::InvalidParameter("samples must be at least 1".into()));
        }
        Ok(())
    }

    /// Draw stream used by the free-function estimators.
    pub fn stream(&self) -> NoiseStream {
        NoiseStream::new(self.seed).purpose(Purpose::Potential)
    }
}

/// Output of [`GaussianPotential::step_terms`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepTerms {
    pub start: PotentialEstimate,
    pub end: PotentialEstimate,
    pub bregman: PotentialEstimate,
    pub payoff: PotentialEstimate,
}

/// Gaussian-smoothed baseline potential over a fixed draw set.
#[derive(Clone, Debug)]
pub struct GaussianPotential {
    set: DecisionSet,
    eta: f64,
    draws: Arc<GaussianDraws>,
}

struct GradAcc {
    value: Moments,
    sum: Vec<f64>,
    sumsq: Vec<f64>,
}

impl GradAcc {
    fn new(n: usize) -> Self {
        Self { value: Moments::new(), sum: vec![0.0; n], sumsq: vec![0.0; n] }
    }

    fn merge(&mut self, other: &GradAcc) {
        self.value.merge(&other.value);
        for (a, b) in self.sum.iter_mut().zip(&other.sum) {
            *a += b;
        }
        for (a, b) in self.sumsq.iter_mut().zip(&other.sumsq) {
            *a += b;
        }
    }
}

/// Entrywise sums of per-sample matrices, plus `Σ h_ij h_ji` so that the
/// symmetrized estimate gets its own standard error.
struct MatAcc {
    n: usize,
    sum: Vec<f64>,
    sumsq: Vec<f64>,
    cross: Vec<f64>,
}

impl MatAcc {
    fn new(n: usize) -> Self {
        Self { n, sum: vec![0.0; n * n], sumsq: vec![0.0; n * n], cross: vec![0.0; n * n] }
    }

    #[inline]
    fn push_dense(&mut self, h: &[f64]) {
        let n = self.n;
        for i in 0..n {
            for j in 0..n {
                let x = h[i * n + j];
                self.sum[i * n + j] += x;
                self.sumsq[i * n + j] += x * x;
                self.cross[i * n + j] += x * h[j * n + i];
            }
        }
    }

    /// Per-sample matrix with a single non-zero row `i` equal to `row`.
    #[inline]
    fn push_row(&mut self, i: usize, row: &[f64]) {
        let n = self.n;
        for (j, &x) in row.iter().enumerate() {
            self.sum[i * n + j] += x;
            self.sumsq[i * n + j] += x * x;
        }
        self.cross[i * n + i] += row[i] * row[i];
    }

    fn merge(&mut self, other: &MatAcc) {
        for (a, b) in self.sum.iter_mut().zip(&other.sum) {
            *a += b;
        }
        for (a, b) in self.sumsq.iter_mut().zip(&other.sumsq) {
            *a += b;
        }
        for (a, b) in self.cross.iter_mut().zip(&other.cross) {
            *a += b;
        }
    }
}

fn mean_and_se(sum: f64, sumsq: f64, m: f64) -> (f64, f64) {
    let mean = sum / m;
    if m < 2.0 {
        return (mean, 0.0);
    }
    let var = ((sumsq - m * mean * mean) / (m - 1.0)).max(0.0);
    (mean, (var / m).sqrt())
}

impl GaussianPotential {
    pub fn new(set: DecisionSet, eta: f64, draws: Arc<GaussianDraws>) -> Result<Self> {
        ensure_positive(eta, "eta")?;
        if draws.dim() != set.dim() {
            return Err(Error::DimensionMismatch { expected: set.dim(), got: draws.dim() });
        }
        if draws.samples() == 0 {
            return Err(Error::InvalidParameter("samples must be at least 1".into()));
        }
        Ok(Self { set, eta, draws })
    }

    pub fn from_config(set: &DecisionSet, cfg: &GaussianSmoothingConfig) -> Result<Self> {
        cfg.validate()?;
        let draws = GaussianDraws::generate(cfg.stream(), cfg.samples, set.dim());
        Self::new(set.clone(), cfg.eta, Arc::new(draws))
    }

    /// Same draws, different scale.
    pub fn with_eta(&self, eta: f64) -> Result<Self> {
        Self::new(self.set.clone(), eta, self.draws.clone())
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn set(&self) -> &DecisionSet {
        &self.set
    }

    pub fn draws(&self) -> &Arc<GaussianDraws> {
        &self.draws
    }

    pub fn samples(&self) -> usize {
        self.draws.samples()
    }

    fn dim(&self) -> usize {
        self.set.dim()
    }

    #[inline]
    fn perturb(&self, theta: &[f64], u: &[f64], out: &mut [f64]) {
        for ((o, t), x) in out.iter_mut().zip(theta).zip(u) {
            *o = t + self.eta * x;
        }
    }

    /// `Φ(Θ + ηu_k)` for every draw, in draw order.
    pub fn sample_values(&self, theta: &[f64]) -> Result<Vec<f64>> {
        self.set.check_input(theta)?;
        let n = self.dim();
        let parts = self.draws.map_blocks(|block| {
            let mut point = vec![0.0; n];
            block
                .chunks_exact(n)
                .map(|u| {
                    self.perturb(theta, u, &mut point);
                    self.set.support(&point)
                })
                .collect::<Vec<_>>()
        });
        Ok(parts.concat())
    }

    pub fn value(&self, theta: &[f64]) -> Result<PotentialEstimate> {
        self.set.check_input(theta)?;
        let n = self.dim();
        let parts = self.draws.map_blocks(|block| {
            let mut point = vec![0.0; n];
            let mut m = Moments::new();
            for u in block.chunks_exact(n) {
                self.perturb(theta, u, &mut point);
                m.push(self.set.support(&point));
            }
            m
        });
        Ok(PotentialEstimate::from_moments(&merge_moments(parts)))
    }

    /// Value and gradient in one pass over the draws.
    ///
    /// The gradient is the average of the oracle maximizers at the perturbed
    /// points, i.e. the expected FTPL action. It is a convex combination of
    /// points of `X` and hence lies in `X`.
    pub fn evaluate(&self, theta: &[f64]) -> Result<(PotentialEstimate, GradientEstimate)> {
        self.set.check_input(theta)?;
        let n = self.dim();
        let parts = self.draws.map_blocks(|block| {
            let mut point = vec![0.0; n];
            let mut acc = GradAcc::new(n);
            for u in block.chunks_exact(n) {
                self.perturb(theta, u, &mut point);
                let (leader, value, _) = self.set.leader(&point);
                acc.value.push(value);
                match leader {
                    Leader::Basis(i) => {
                        acc.sum[i] += 1.0;
                        acc.sumsq[i] += 1.0;
                    }
                    Leader::Zero => {}
                    other => {
                        for i in 0..n {
                            let c = other.component(i);
                            acc.sum[i] += c;
                            acc.sumsq[i] += c * c;
                        }
                    }
                }
            }
            acc
        });
        let mut acc = GradAcc::new(n);
        for p in &parts {
            acc.merge(p);
        }
        let m = self.samples() as f64;
        let (mean, std_error): (Vec<f64>, Vec<f64>) =
            acc.sum.iter().zip(&acc.sumsq).map(|(&s, &q)| mean_and_se(s, q, m)).unzip();
        Ok((
            PotentialEstimate::from_moments(&acc.value),
            GradientEstimate { mean, std_error, samples_used: self.samples() },
        ))
    }

    pub fn gradient(&self, theta: &[f64]) -> Result<GradientEstimate> {
        Ok(self.evaluate(theta)?.1)
    }

    /// `Φ̃(y) − Φ̃(x)` with common random numbers.
    pub fn difference(&self, y: &[f64], x: &[f64]) -> Result<PotentialEstimate> {
        self.set.check_input(y)?;
        self.set.check_input(x)?;
        let n = self.dim();
        let parts = self.draws.map_blocks(|block| {
            let mut py = vec![0.0; n];
            let mut px = vec![0.0; n];
            let mut m = Moments::new();
            for u in block.chunks_exact(n) {
                self.perturb(y, u, &mut py);
                self.perturb(x, u, &mut px);
                m.push(self.set.support(&py) - self.set.support(&px));
            }
            m
        });
        Ok(PotentialEstimate::from_moments(&merge_moments(parts)))
    }

    /// Bregman divergence `D(y, x) = Φ̃(y) − Φ̃(x) − ⟨∇Φ̃(x), y − x⟩`, all three
    /// terms on the same draws. Each per-sample term is non-negative.
    pub fn bregman(&self, y: &[f64], x: &[f64]) -> Result<PotentialEstimate> {
        self.set.check_input(y)?;
        self.set.check_input(x)?;
        let n = self.dim();
        let step: Vec<f64> = y.iter().zip(x).map(|(a, b)| a - b).collect();
        let parts = self.draws.map_blocks(|block| {
            let mut py = vec![0.0; n];
            let mut px = vec![0.0; n];
            let mut m = Moments::new();
            for u in block.chunks_exact(n) {
                self.perturb(y, u, &mut py);
                self.perturb(x, u, &mut px);
                let (leader, vx, _) = self.set.leader(&px);
                m.push(self.set.support(&py) - vx - leader.dot(&step));
            }
            m
        });
        Ok(PotentialEstimate::from_moments(&merge_moments(parts)))
    }

    /// Ledger terms for one round step from `x` to `x + step`, on shared draws:
    /// `Φ̃(x)`, `Φ̃(x + step)`, the Bregman divergence and the payoff
    /// `⟨∇Φ̃(x), step⟩`.
    pub fn step_terms(&self, x: &[f64], step: &[f64]) -> Result<StepTerms> {
        self.set.check_input(x)?;
        self.set.check_input(step)?;
        let n = self.dim();
        let y: Vec<f64> = x.iter().zip(step).map(|(a, b)| a + b).collect();
        let parts = self.draws.map_blocks(|block| {
            let mut py = vec![0.0; n];
            let mut px = vec![0.0; n];
            let mut acc = [Moments::new(), Moments::new(), Moments::new(), Moments::new()];
            for u in block.chunks_exact(n) {
                self.perturb(&y, u, &mut py);
                self.perturb(x, u, &mut px);
                let (leader, vx, _) = self.set.leader(&px);
                let vy = self.set.support(&py);
                let payoff = leader.dot(step);
                acc[0].push(vx);
                acc[1].push(vy);
                acc[2].push(vy - vx - payoff);
                acc[3].push(payoff);
            }
            acc
        });
        let mut acc = [Moments::new(), Moments::new(), Moments::new(), Moments::new()];
        for p in &parts {
            for (a, b) in acc.iter_mut().zip(p) {
                a.merge(b);
            }
        }
        Ok(StepTerms {
            start: PotentialEstimate::from_moments(&acc[0]),
            end: PotentialEstimate::from_moments(&acc[1]),
            bregman: PotentialEstimate::from_moments(&acc[2]),
            payoff: PotentialEstimate::from_moments(&acc[3]),
        })
    }

    /// Monte Carlo Hessian estimate.
    ///
    /// `GradientForm`: `(1/η) E[∇Φ(Θ + ηu) uᵀ]`.
    /// `ValueForm`: `(1/η²) E[(Φ(Θ + ηu) − Φ(Θ)) (uuᵀ − I)]`; subtracting the
    /// constant `Φ(Θ)` leaves the mean unchanged because `E[uuᵀ − I] = 0`.
    pub fn hessian(&self, theta: &[f64], form: HessianForm) -> Result<HessianEstimate> {
        self.set.check_input(theta)?;
        let n = self.dim();
        let eta = self.eta;
        let base = self.set.support(theta);
        let parts = self.draws.map_blocks(|block| {
            let mut point = vec![0.0; n];
            let mut scratch = vec![0.0; n * n];
            let mut row = vec![0.0; n];
            let mut acc = MatAcc::new(n);
            for u in block.chunks_exact(n) {
                self.perturb(theta, u, &mut point);
                match form {
                    HessianForm::GradientForm => match self.set.leader(&point).0 {
                        Leader::Basis(i) => {
                            for (r, x) in row.iter_mut().zip(u) {
                                *r = x / eta;
                            }
                            acc.push_row(i, &row);
                        }
                        leader => {
                            for i in 0..n {
                                let a = leader.component(i) / eta;
                                for j in 0..n {
                                    scratch[i * n + j] = a * u[j];
                                }
                            }
                            acc.push_dense(&scratch);
                        }
                    },
                    HessianForm::ValueForm => {
                        let c = (self.set.support(&point) - base) / (eta * eta);
                        for i in 0..n {
                            for j in 0..n {
                                let id = if i == j { 1.0 } else { 0.0 };
                                scratch[i * n + j] = c * (u[i] * u[j] - id);
                            }
                        }
                        acc.push_dense(&scratch);
                    }
                }
            }
            acc
        });
        let mut acc = MatAcc::new(n);
        for p in &parts {
            acc.merge(p);
        }
        let m = self.samples() as f64;
        let mut raw = DMatrix::zeros(n, n);
        let mut raw_se = DMatrix::zeros(n, n);
        let mut sym = DMatrix::zeros(n, n);
        let mut sym_se = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let (mean, se) = mean_and_se(acc.sum[i * n + j], acc.sumsq[i * n + j], m);
                raw[(i, j)] = mean;
                raw_se[(i, j)] = se;
            }
        }
        for i in 0..n {
            for j in 0..n {
                // (h_ij + h_ji)/2 per sample.
                let s = 0.5 * (acc.sum[i * n + j] + acc.sum[j * n + i]);
                let q = 0.25
                    * (acc.sumsq[i * n + j] + acc.sumsq[j * n + i] + 2.0 * acc.cross[i * n + j]);
                let (mean, se) = mean_and_se(s, q, m);
                sym[(i, j)] = mean;
                sym_se[(i, j)] = se;
            }
        }
        Ok(HessianEstimate {
            raw,
            raw_std_error: raw_se,
            symmetrized: sym,
            symmetrized_std_error: sym_se,
            form,
            samples_used: self.samples(),
        })
    }

    /// Mean and standard error of `Σ_ij W_ij h_ij` over the per-sample Hessian
    /// terms `h`. Linear functionals of the estimate (a quadratic form
    /// `vᵀHv`, a signed entry sum) get their error bars this way.
    pub fn hessian_functional(
        &self,
        theta: &[f64],
        form: HessianForm,
        weights: &DMatrix<f64>,
    ) -> Result<PotentialEstimate> {
        self.set.check_input(theta)?;
        let n = self.dim();
        if weights.nrows() != n || weights.ncols() != n {
            return Err(Error::DimensionMismatch { expected: n, got: weights.nrows() });
        }
        let eta = self.eta;
        let base = self.set.support(theta);
        let parts = self.draws.map_blocks(|block| {
            let mut point = vec![0.0; n];
            let mut m = Moments::new();
            for u in block.chunks_exact(n) {
                self.perturb(theta, u, &mut point);
                let x = match form {
                    HessianForm::GradientForm => {
                        let leader = self.set.leader(&point).0;
                        let mut s = 0.0;
                        for i in 0..n {
                            let a = leader.component(i);
                            if a != 0.0 {
                                for j in 0..n {
                                    s += weights[(i, j)] * a * u[j];
                                }
                            }
                        }
                        s / eta
                    }
                    HessianForm::ValueForm => {
                        let c = (self.set.support(&point) - base) / (eta * eta);
                        let mut s = 0.0;
                        for i in 0..n {
                            for j in 0..n {
                                let id = if i == j { 1.0 } else { 0.0 };
                                s += weights[(i, j)] * (u[i] * u[j] - id);
                            }
                        }
                        c * s
                    }
                };
                m.push(x);
            }
            m
        });
        Ok(PotentialEstimate::from_moments(&merge_moments(parts)))
    }
}

fn merge_moments(parts: Vec<Moments>) -> Moments {
    let mut total = Moments::new();
    for p in &parts {
        total.merge(p);
    }
    total
}

/// Unbiased `M`-sample estimate of `E[Φ(Θ + ηu)]`.
pub fn gaussian_smoothed_value(
    theta: &[f64],
    cfg: &GaussianSmoothingConfig,
    set: &DecisionSet,
) -> Result<PotentialEstimate> {
    GaussianPotential::from_config(set, cfg)?.value(theta)
}

/// Average of `M` oracle maximizers at `Θ + ηu_k`.
pub fn gaussian_smoothed_gradient(
    theta: &[f64],
    cfg: &GaussianSmoothingConfig,
    set: &DecisionSet,
) -> Result<GradientEstimate> {
    GaussianPotential::from_config(set, cfg)?.gradient(theta)
}

pub fn gaussian_smoothed_hessian(
    theta: &[f64],
    cfg: &GaussianSmoothingConfig,
    set: &DecisionSet,
    form: HessianForm,
) -> Result<HessianEstimate> {
    GaussianPotential::from_config(set, cfg)?.hessian(theta, form)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn cfg(eta: f64, samples: usize, seed: u64) -> GaussianSmoothingConfig {
        GaussianSmoothingConfig::new(eta, samples, seed).unwrap()
    }

    fn within(est: f64, truth: f64, se: f64) -> bool {
        (est - truth).abs() <= 3.0 * se
    }

    #[test]
    fn max_of_two_normals() {
        // E[max(u1, u2)] = 1/√π.
        let set = DecisionSet::simplex(2).unwrap();
        let est = gaussian_smoothed_value(&[0.0, 0.0], &cfg(1.0, DEFAULT_SAMPLES, 11), &set).unwrap();
        assert_eq!(est.samples_used, DEFAULT_SAMPLES);
        assert!(within(est.value, 1.0 / PI.sqrt(), est.std_error), "{est:?}");
    }

    #[test]
    fn chi_mean_in_two_dimensions() {
        // E‖u‖₂ = √(π/2) for k = 2.
        let set = DecisionSet::l2_ball(2).unwrap();
        let est = gaussian_smoothed_value(&[0.0, 0.0], &cfg(1.0, DEFAULT_SAMPLES, 12), &set).unwrap();
        assert!(within(est.value, (PI / 2.0).sqrt(), est.std_error), "{est:?}");
    }

    #[test]
    fn fixed_seed_is_bit_identical() {
        let set = DecisionSet::simplex(4).unwrap();
        let c = cfg(0.7, 3000, 99);
        let a = gaussian_smoothed_value(&[0.1, 0.2, -0.3, 0.0], &c, &set).unwrap();
        let b = gaussian_smoothed_value(&[0.1, 0.2, -0.3, 0.0], &c, &set).unwrap();
        assert_eq!(a.value.to_bits(), b.value.to_bits());
        assert_eq!(a.std_error.to_bits(), b.std_error.to_bits());
    }

    #[test]
    fn symmetric_gradient_on_two_experts() {
        let set = DecisionSet::simplex(2).unwrap();
        let g = gaussian_smoothed_gradient(&[0.0, 0.0], &cfg(1.0, DEFAULT_SAMPLES, 13), &set).unwrap();
        assert!(within(g.mean[0], 0.5, g.std_error[0]));
        assert!((g.mean[0] + g.mean[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn far_leader_gets_all_mass() {
        // P[u1 − u2 > −10] = Φ_N(10/√2), indistinguishable from 1.
        let set = DecisionSet::simplex(2).unwrap();
        let g = gaussian_smoothed_gradient(&[10.0, 0.0], &cfg(1.0, DEFAULT_SAMPLES, 14), &set).unwrap();
        let truth = 0.5 * statrs::function::erf::erfc(-10.0 / 2.0);
        assert!((g.mean[0] - truth).abs() <= 3.0 * g.std_error[0] + 1e-12, "{g:?}");
    }

    #[test]
    fn small_eta_recovers_baseline_gradient() {
        let set = DecisionSet::l2_ball(2).unwrap();
        let g = gaussian_smoothed_gradient(&[3.0, 4.0], &cfg(0.01, DEFAULT_SAMPLES, 15), &set).unwrap();
        // The small-η bias, O(η²/‖Θ‖²), is two orders below the standard error here.
        assert!(within(g.mean[0], 0.6, g.std_error[0]), "{g:?}");
        assert!(within(g.mean[1], 0.8, g.std_error[1]), "{g:?}");
    }

    #[test]
    fn gradient_lies_in_set() {
        let sets = [
            DecisionSet::simplex(3).unwrap(),
            DecisionSet::l2_ball(3).unwrap(),
            DecisionSet::vertex_set(vec![vec![1.0, 0.0, 0.0], vec![0.0, 2.0, 0.0], vec![0.0, 0.0, -1.0]])
                .unwrap(),
        ];
        for set in &sets {
            let g = gaussian_smoothed_gradient(&[0.3, -0.2, 0.1], &cfg(0.5, 2000, 17), set).unwrap();
            assert!(set.contains(&g.mean, 1e-12), "{set:?} {g:?}");
        }
    }

    #[test]
    fn two_expert_hessian_gradient_form() {
        // Tr(H) = E[max(u1, u2)] = 1/√π; H = [[c, −c], [−c, c]] with c = Tr/2.
        let set = DecisionSet::simplex(2).unwrap();
        let h = gaussian_smoothed_hessian(&[0.0, 0.0], &cfg(1.0, 100_000, 18), &set, HessianForm::GradientForm)
            .unwrap();
        let c = 0.5 / PI.sqrt();
        for (i, j, s) in [(0, 0, 1.0), (1, 1, 1.0), (0, 1, -1.0), (1, 0, -1.0)] {
            assert!(within(h.raw[(i, j)], s * c, h.raw_std_error[(i, j)]), "{i}{j}: {}", h.raw[(i, j)]);
        }
    }

    #[test]
    fn one_dimensional_ball_hessian() {
        // Φ = |Θ|; H(0) = E|u| = √(2/π).
        let set = DecisionSet::l2_ball(1).unwrap();
        let h = gaussian_smoothed_hessian(&[0.0], &cfg(1.0, 100_000, 19), &set, HessianForm::GradientForm)
            .unwrap();
        assert!(within(h.raw[(0, 0)], (2.0 / PI).sqrt(), h.raw_std_error[(0, 0)]));
    }

    #[test]
    fn hessian_forms_agree() {
        let set = DecisionSet::simplex(3).unwrap();
        let c = cfg(0.8, 100_000, 20);
        let theta = [0.2, -0.1, 0.4];
        let g = gaussian_smoothed_hessian(&theta, &c, &set, HessianForm::GradientForm).unwrap();
        let v = gaussian_smoothed_hessian(
            &theta,
            &GaussianSmoothingConfig { seed: 21, ..c },
            &set,
            HessianForm::ValueForm,
        )
        .unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let tol = 3.0 * (g.symmetrized_std_error[(i, j)].powi(2) + v.symmetrized_std_error[(i, j)].powi(2)).sqrt();
                assert!((g.symmetrized[(i, j)] - v.symmetrized[(i, j)]).abs() <= tol, "({i},{j})");
            }
        }
    }

    #[test]
    fn bregman_terms_are_nonnegative_per_sample() {
        let set = DecisionSet::simplex(3).unwrap();
        let pot = GaussianPotential::from_config(&set, &cfg(1.0, 5000, 22)).unwrap();
        let d = pot.bregman(&[1.0, 0.0, -1.0], &[0.0, 0.5, 0.0]).unwrap();
        assert!(d.value >= 0.0);
        let diff = pot.difference(&[1.0, 0.0, -1.0], &[0.0, 0.5, 0.0]).unwrap();
        let (fx, gx) = pot.evaluate(&[0.0, 0.5, 0.0]).unwrap();
        let fy = pot.value(&[1.0, 0.0, -1.0]).unwrap();
        assert!((diff.value - (fy.value - fx.value)).abs() < 1e-12);
        let lin = gx.mean[0] * 1.0 + gx.mean[1] * -0.5 + gx.mean[2] * -1.0;
        assert!((d.value - (diff.value - lin)).abs() < 1e-12);
    }

    #[test]
    fn step_terms_match_separate_estimates() {
        let set = DecisionSet::l2_ball(3).unwrap();
        let pot = GaussianPotential::from_config(&set, &cfg(0.7, 3000, 5)).unwrap();
        let x = [0.3, -1.0, 0.2];
        let step = [0.5, 0.5, -0.1];
        let y: Vec<f64> = x.iter().zip(&step).map(|(a, b)| a + b).collect();
        let terms = pot.step_terms(&x, &step).unwrap();
        let (fx, gx) = pot.evaluate(&x).unwrap();
        assert!((terms.start.value - fx.value).abs() < 1e-12);
        assert!((terms.end.value - pot.value(&y).unwrap().value).abs() < 1e-12);
        assert!((terms.bregman.value - pot.bregman(&y, &x).unwrap().value).abs() < 1e-12);
        let lin: f64 = gx.mean.iter().zip(&step).map(|(g, s)| g * s).sum();
        assert!((terms.payoff.value - lin).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_config() {
        assert!(GaussianSmoothingConfig::new(0.0, 10, 1).is_err());
        assert!(GaussianSmoothingConfig::new(1.0, 0, 1).is_err());
        let set = DecisionSet::simplex(2).unwrap();
        assert!(gaussian_smoothed_value(&[f64::INFINITY, 0.0], &cfg(1.0, 10, 1), &set).is_err());
    }
}
