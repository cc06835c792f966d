//! Brute-force evaluation of the infimal-convolution form
//! `inf_{Θ*} { Φ(Θ*) + η S((Θ − Θ*)/η) }`.
//!
//! This is an independent oracle for the closed-form FTRL potentials: the
//! entropic potential is the inf-convolution of the simplex support function
//! with `S = log-sum-exp`, the quadratic one that of the ball support function
//! with `S = ½‖·‖²`. Evaluation is a plain grid search, so only dimensions 1
//! and 2 are accepted.

use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, ensure_positive, Error, Result};
use crate::potentials::DecisionSet;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InfConvRegularizer {
    /// Negative entropy on the simplex; `S = log Σ exp`.
    Entropic,
    /// `½‖w‖²` on the unit ball; `S = ½‖·‖²`.
    Quadratic,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InfConvValue {
    /// Smallest objective value on the grid. Never below the true infimum.
    pub value: f64,
    /// Upper bound on `value − infimum`, from the objective's Lipschitz
    /// constant over the grid box and half the cell diagonal.
    pub grid_tolerance: f64,
}

fn log_sum_exp(z: &[f64]) -> f64 {
    let m = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    m + z.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

pub fn infconv_bruteforce_value(
    theta: &[f64],
    eta: f64,
    regularizer: InfConvRegularizer,
    grid_resolution: usize,
) -> Result<InfConvValue> {
    ensure_positive(eta, "eta")?;
    ensure_finite(theta, "reward vector")?;
    let dim = theta.len();
    if dim == 0 || dim > 2 {
        return Err(Error::InvalidParameter(format!(
            "grid search supports dimension 1 or 2, got {dim}"
        )));
    }
    if grid_resolution < 100 {
        return Err(Error::InvalidParameter(format!(
            "grid_resolution must be at least 100, got {grid_resolution}"
        )));
    }
    let set = match regularizer {
        InfConvRegularizer::Entropic => DecisionSet::simplex(dim)?,
        InfConvRegularizer::Quadratic => DecisionSet::l2_ball(dim)?,
    };
    // The box [−B, B]^d contains a minimizer: Θ*(1 − η/‖Θ‖)₊ for the quadratic
    // case, any c·1 for the entropic case.
    let half_width = theta.iter().fold(0.0f64, |m, x| m.max(x.abs())) + 2.0 * eta + 1.0;
    let g = grid_resolution;
    let spacing = 2.0 * half_width / (g - 1) as f64;
    let node = |k: usize| -half_width + spacing * k as f64;

    let objective = |star: &[f64]| -> f64 {
        let scaled: Vec<f64> = theta.iter().zip(star).map(|(t, s)| (t - s) / eta).collect();
        let s = match regularizer {
            InfConvRegularizer::Entropic => log_sum_exp(&scaled),
            InfConvRegularizer::Quadratic => 0.5 * scaled.iter().map(|x| x * x).sum::<f64>(),
        };
        set.support(star) + eta * s
    };

    let mut best = f64::INFINITY;
    let mut star = vec![0.0; dim];
    if dim == 1 {
        for k in 0..g {
            star[0] = node(k);
            best = best.min(objective(&star));
        }
    } else {
        for a in 0..g {
            star[0] = node(a);
            for b in 0..g {
                star[1] = node(b);
                best = best.min(objective(&star));
            }
        }
    }

    // ∇Φ lies in X (norm ≤ 1); the S-term gradient is softmax (norm ≤ 1) or
    // (Θ − Θ*)/η, bounded over the box.
    let theta_norm = theta.iter().map(|x| x * x).sum::<f64>().sqrt();
    let s_lipschitz = match regularizer {
        InfConvRegularizer::Entropic => 1.0,
        InfConvRegularizer::Quadratic => (theta_norm + half_width * (dim as f64).sqrt()) / eta,
    };
    let half_diagonal = 0.5 * spacing * (dim as f64).sqrt();
    Ok(InfConvValue { value: best, grid_tolerance: (1.0 + s_lipschitz) * half_diagonal })
}
