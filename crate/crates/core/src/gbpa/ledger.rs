//! Regret decomposition.
//!
//! With `Φ_0 = Φ` and `Φ(0) = 0`, the regret of the played sequence splits as
//! `Φ(Θ_T) − Φ_T(Θ_T)` (underestimation) plus per-round
//! `Φ_t(Θ_{t−1}) − Φ_{t−1}(Θ_{t−1})` (overestimation) plus per-round
//! Bregman divergences `D_{Φ_t}(Θ_t, Θ_{t−1})`. The split is an algebraic
//! identity, so it also holds exactly for the sample-average potentials of the
//! Monte Carlo learner when every term is evaluated on that round's draws.

use serde::{Deserialize, Serialize};

use super::bounds::{theoretical_bound, BoundSetting};
use super::game::{GameTrace, PotentialSpec};
use crate::error::{Error, Result};
use crate::smoothing::{PotentialEstimate, SmoothedPotential};
use crate::stats::quadrature_sum;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegretLedger {
    pub divergence: Vec<f64>,
    pub divergence_std_error: Vec<f64>,
    pub overestimation: Vec<f64>,
    pub overestimation_std_error: Vec<f64>,
    pub underestimation: f64,
    pub underestimation_std_error: f64,
    pub realized_regret: f64,
    /// Error of the realized regret as an estimate of the regret of the exact
    /// expected-action learner; zero for closed-form potentials.
    pub realized_std_error: f64,
    pub bound: Option<f64>,
}

impl RegretLedger {
    pub fn total_divergence(&self) -> f64 {
        self.divergence.iter().sum()
    }

    pub fn total_overestimation(&self) -> f64 {
        self.overestimation.iter().sum()
    }

    /// `underestimation + Σ overestimation + Σ divergence`.
    pub fn reconstructed(&self) -> f64 {
        self.underestimation + self.total_overestimation() + self.total_divergence()
    }

    /// `realized − reconstructed`.
    pub fn residual(&self) -> f64 {
        self.realized_regret - self.reconstructed()
    }

    /// `realized ≤ bound + 3·se`; `None` without a bound.
    pub fn within_bound(&self) -> Option<bool> {
        self.bound.map(|b| self.realized_regret <= b + 3.0 * self.realized_std_error)
    }
}

struct Terms {
    start: PotentialEstimate,
    end: PotentialEstimate,
    bregman: PotentialEstimate,
    payoff: PotentialEstimate,
}

fn step_terms(phi: &SmoothedPotential, x: &[f64], step: &[f64], y: &[f64]) -> Result<Terms> {
    if let SmoothedPotential::GaussianMc(p) = phi {
        let s = p.step_terms(x, step)?;
        return Ok(Terms { start: s.start, end: s.end, bregman: s.bregman, payoff: s.payoff });
    }
    let grad = phi.gradient(x)?.mean;
    Ok(Terms {
        start: phi.value(x)?,
        end: phi.value(y)?,
        bregman: phi.bregman(y, x)?,
        payoff: PotentialEstimate::exact(crate::potentials::dot(&grad, step)),
    })
}

/// Bound attached to a trace, when the sharp theorem for its setting applies.
fn attached_bound(trace: &GameTrace) -> Option<f64> {
    if !matches!(trace.potential, PotentialSpec::GaussianMc { .. }) {
        return None;
    }
    let setting = BoundSetting::for_set(&trace.set);
    let norms = trace.reward_norms(setting.norm());
    theoretical_bound(setting, &trace.schedule, &norms, trace.set.dim()).ok()
}

/// Rebuilds every `Φ_t` from the trace (same seeds, same `η_t`) and evaluates
/// the three penalty streams.
pub fn decompose_regret(trace: &GameTrace) -> Result<RegretLedger> {
    let set = &trace.set;
    let horizon = trace.horizon();
    let mut ledger = RegretLedger {
        divergence: Vec::with_capacity(horizon),
        divergence_std_error: Vec::with_capacity(horizon),
        overestimation: Vec::with_capacity(horizon),
        overestimation_std_error: Vec::with_capacity(horizon),
        underestimation: 0.0,
        underestimation_std_error: 0.0,
        realized_regret: trace.realized_regret(),
        realized_std_error: 0.0,
        bound: attached_bound(trace),
    };
    // `Φ_0 = Φ`, and `Φ(0) = 0` for every decision set.
    let mut prev_end = PotentialEstimate::exact(0.0);
    let mut payoff_se = Vec::with_capacity(horizon);
    let mut prev = vec![0.0; set.dim()];
    for round in &trace.rounds {
        if !(round.eta.is_finite() && round.eta > 0.0) {
            return Err(Error::MissingData(format!("round {} has no valid eta", round.t)));
        }
        let phi = trace.potential.build(set, round.eta, trace.root_seed, round.t)?;
        let terms = step_terms(&phi, &prev, &round.theta, &round.cumulative)?;
        ledger.overestimation.push(terms.start.value - prev_end.value);
        ledger.overestimation_std_error.push(quadrature_sum([terms.start.std_error, prev_end.std_error]));
        ledger.divergence.push(terms.bregman.value);
        ledger.divergence_std_error.push(terms.bregman.std_error);
        payoff_se.push(terms.payoff.std_error);
        prev_end = terms.end;
        prev.clone_from(&round.cumulative);
    }
    ledger.underestimation = set.support(&prev) - prev_end.value;
    ledger.underestimation_std_error = prev_end.std_error;
    ledger.realized_std_error = quadrature_sum(payoff_se);
    Ok(ledger)
}
