//! Monte Carlo checks of the 1D correspondence and of Gumbel noise versus Hedge.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::perturbation::{gumbel_from_uniform, Perturbation};
use super::regularizer::{ftpl_to_ftrl, ftrl_to_ftpl};
use crate::error::{ensure_finite, ensure_positive, Error, Result};
use crate::rng::{open01, NoiseStream, Purpose, CHUNK_ROWS};
use crate::smoothing::entropic_ftrl_potential;
use crate::stats::Moments;
use crate::verify::CheckReport;

/// Quadrature and finite-difference floor on the comparison tolerance.
pub const DUALITY_TOLERANCE: f64 = 1e-3;

fn chunk_count(samples: usize) -> usize {
    samples.div_ceil(CHUNK_ROWS)
}

fn rows_in(chunk: usize, samples: usize) -> usize {
    CHUNK_ROWS.min(samples - chunk * CHUNK_ROWS)
}

/// `samples` draws from `pert`, deterministic in `seed` for any thread count.
pub fn draw_perturbations(pert: &Perturbation, samples: usize, seed: u64) -> Result<Vec<f64>> {
    let stream = NoiseStream::new(seed).purpose(Purpose::Check);
    let parts: Vec<Result<Vec<f64>>> = (0..chunk_count(samples))
        .into_par_iter()
        .map(|c| {
            let mut rng = stream.chunk_rng(c as u64);
            (0..rows_in(c, samples)).map(|_| pert.sample(&mut rng)).collect()
        })
        .collect();
    let mut out = Vec::with_capacity(samples);
    for p in parts {
        out.extend(p?);
    }
    Ok(out)
}

fn moments_of(draws: &[f64], f: impl Fn(f64) -> f64 + Sync) -> Moments {
    draws
        .par_chunks(CHUNK_ROWS)
        .map(|c| c.iter().map(|&u| f(u)).collect::<Moments>())
        .collect::<Vec<_>>()
        .iter()
        .fold(Moments::new(), |mut acc, m| {
            acc.merge(m);
            acc
        })
}

/// Smoothed potential `E[max_{w∈[0,1]} w(Θ + u)] = E[max(0, Θ + u)]` against
/// the regularized potential `R*(Θ)` built from the same distribution, both
/// shifted to agree at `Θ = 0`. Each probe passes within
/// `max(3·std_error, 1e-3)`.
pub fn check_potential_equality(
    pert: &Perturbation,
    resolution: usize,
    probes: &[f64],
    samples: usize,
    seed: u64,
) -> Result<CheckReport> {
    ensure_finite(probes, "probe points")?;
    let recovered = ftrl_to_ftpl(&ftpl_to_ftrl(pert, resolution)?)?;
    let draws = draw_perturbations(pert, samples, seed)?;
    let r0 = recovered.conjugate_value(0.0);
    let mut subs = Vec::with_capacity(probes.len());
    for &theta in probes {
        let m = moments_of(&draws, |u| (theta + u).max(0.0) - u.max(0.0));
        let regularized = recovered.conjugate_value(theta) - r0;
        let tol = (3.0 * m.std_error()).max(DUALITY_TOLERANCE);
        subs.push(
            CheckReport::new(format!("theta={theta}"), (m.mean() - regularized).abs(), tol, 0.0).with_config(json!({
                "smoothed": m.mean(),
                "regularized": regularized,
                "mc_std_error": m.std_error(),
            })),
        );
    }
    Ok(summarize("potential_equality", pert, resolution, samples, seed, subs))
}

/// Central difference of the smoothed potential (common draws) against
/// `P[u > −Θ] = 1 − F(−Θ)`, within `max(3·std_error, 1e-3)`.
pub fn check_derivative_identity(
    pert: &Perturbation,
    probes: &[f64],
    step: f64,
    samples: usize,
    seed: u64,
) -> Result<CheckReport> {
    ensure_positive(step, "finite-difference step")?;
    ensure_finite(probes, "probe points")?;
    let draws = draw_perturbations(pert, samples, seed)?;
    let subs = probes
        .iter()
        .map(|&theta| {
            let m = moments_of(&draws, |u| ((theta + step + u).max(0.0) - (theta - step + u).max(0.0)) / (2.0 * step));
            let exact = 1.0 - pert.cdf(-theta);
            let tol = (3.0 * m.std_error()).max(DUALITY_TOLERANCE);
            CheckReport::new(format!("theta={theta}"), (m.mean() - exact).abs(), tol, 0.0)
                .with_config(json!({"finite_difference": m.mean(), "exact": exact, "mc_std_error": m.std_error()}))
        })
        .collect();
    Ok(summarize("derivative_identity", pert, 0, samples, seed, subs))
}

fn summarize(
    name: &str,
    pert: &Perturbation,
    resolution: usize,
    samples: usize,
    seed: u64,
    subs: Vec<CheckReport>,
) -> CheckReport {
    let worst = subs.iter().map(CheckReport::margin).fold(f64::NEG_INFINITY, f64::max);
    CheckReport::new(name, worst, 0.0, 0.0)
        .with_config(json!({"perturbation": pert, "resolution": resolution, "samples": samples, "seed": seed}))
        .with_sub(subs)
}

/// Softmax against the frequency with which `argmax_i Θ_i + η g_i` picks each
/// coordinate under standard Gumbel noise `g`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GumbelHedgeReport {
    pub theta: Vec<f64>,
    pub eta: f64,
    pub samples: usize,
    pub seed: u64,
    pub softmax: Vec<f64>,
    pub frequency: Vec<f64>,
    /// Binomial standard error `√(p_i(1 − p_i)/M)` at the softmax probability.
    pub std_error: Vec<f64>,
    pub sup_deviation: f64,
}

impl GumbelHedgeReport {
    /// `sup_i |freq_i − p_i| ≤ 3·max_i se_i`.
    pub fn report(&self) -> CheckReport {
        let se = self.std_error.iter().copied().fold(0.0, f64::max);
        CheckReport::new("gumbel_hedge", self.sup_deviation, 0.0, se).with_config(json!({
            "theta": self.theta,
            "eta": self.eta,
            "samples": self.samples,
            "seed": self.seed,
            "softmax": self.softmax,
            "frequency": self.frequency,
        }))
    }
}

pub fn gumbel_hedge_check(theta: &[f64], eta: f64, samples: usize, seed: u64) -> Result<GumbelHedgeReport> {
    ensure_positive(eta, "eta")?;
    ensure_finite(theta, "theta")?;
    if theta.is_empty() {
        return Err(Error::InvalidParameter("theta must have at least one coordinate".into()));
    }
    if samples == 0 {
        return Err(Error::InvalidParameter("samples must be at least 1".into()));
    }
    let n = theta.len();
    let stream = NoiseStream::new(seed).purpose(Purpose::Gumbel);
    let counts = (0..chunk_count(samples))
        .into_par_iter()
        .map(|c| {
            let mut rng = stream.chunk_rng(c as u64);
            let mut counts = vec![0u64; n];
            for _ in 0..rows_in(c, samples) {
                let mut best = 0;
                let mut best_val = f64::NEG_INFINITY;
                for (i, t) in theta.iter().enumerate() {
                    let v = t + eta * gumbel_from_uniform(open01(&mut rng));
                    if v > best_val {
                        best = i;
                        best_val = v;
                    }
                }
                counts[best] += 1;
            }
            counts
        })
        .reduce(
            || vec![0u64; n],
            |mut a, b| {
                a.iter_mut().zip(&b).for_each(|(x, y)| *x += y);
                a
            },
        );
    let m = samples as f64;
    let softmax = entropic_ftrl_potential(theta, eta)?.gradient;
    let frequency: Vec<f64> = counts.iter().map(|&c| c as f64 / m).collect();
    let std_error: Vec<f64> = softmax.iter().map(|p| (p * (1.0 - p) / m).sqrt()).collect();
    let sup_deviation = softmax.iter().zip(&frequency).map(|(p, f)| (p - f).abs()).fold(0.0, f64::max);
    Ok(GumbelHedgeReport { theta: theta.to_vec(), eta, samples, seed, softmax, frequency, std_error, sup_deviation })
}
