//! Closed-form regularized potentials.
//!
//! `η log Σ exp(Θ_i/η)` is the entropic potential over the simplex (Hedge);
//! its gradient is `softmax(Θ/η)`. The quadratic potential over the unit ball
//! is the Huber function of `‖Θ‖₂`: `‖Θ‖²/(2η)` inside radius `η`, `‖Θ‖ − η/2`
//! outside.

use nalgebra::DMatrix;

use crate::error::{ensure_finite, ensure_positive, Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct FtrlEvaluation {
    pub value: f64,
    pub gradient: Vec<f64>,
}

fn check(theta: &[f64], eta: f64) -> Result<()> {
    ensure_positive(eta, "eta")?;
    if theta.is_empty() {
        return Err(Error::InvalidParameter("empty reward vector".into()));
    }
    ensure_finite(theta, "reward vector")
}

pub fn entropic_ftrl_potential(theta: &[f64], eta: f64) -> Result<FtrlEvaluation> {
    check(theta, eta)?;
    let max = theta.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let weights: Vec<f64> = theta.iter().map(|t| ((t - max) / eta).exp()).collect();
    let total: f64 = weights.iter().sum();
    Ok(FtrlEvaluation {
        value: max + eta * total.ln(),
        gradient: weights.iter().map(|w| w / total).collect(),
    })
}

/// `(diag(p) − ppᵀ)/η` with `p = softmax(Θ/η)`.
pub fn entropic_ftrl_hessian(theta: &[f64], eta: f64) -> Result<DMatrix<f64>> {
    let p = entropic_ftrl_potential(theta, eta)?.gradient;
    let n = p.len();
    Ok(DMatrix::from_fn(n, n, |i, j| {
        let d = if i == j { p[i] } else { 0.0 };
        (d - p[i] * p[j]) / eta
    }))
}

pub fn quadratic_ftrl_potential(theta: &[f64], eta: f64) -> Result<FtrlEvaluation> {
    check(theta, eta)?;
    let norm = theta.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm <= eta {
        Ok(FtrlEvaluation {
            value: norm * norm / (2.0 * eta),
            gradient: theta.iter().map(|x| x / eta).collect(),
        })
    } else {
        Ok(FtrlEvaluation {
            value: norm - eta / 2.0,
            gradient: theta.iter().map(|x| x / norm).collect(),
        })
    }
}

/// `I/η` inside radius `η`; `(I − ΘΘᵀ/‖Θ‖²)/‖Θ‖` outside. The inside form is
/// used on the boundary.
pub fn quadratic_ftrl_hessian(theta: &[f64], eta: f64) -> Result<DMatrix<f64>> {
    check(theta, eta)?;
    let n = theta.len();
    let norm = theta.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm <= eta {
        Ok(DMatrix::identity(n, n) / eta)
    } else {
        Ok(DMatrix::from_fn(n, n, |i, j| {
            let d = if i == j { 1.0 } else { 0.0 };
            (d - theta[i] * theta[j] / (norm * norm)) / norm
        }))
    }
}
