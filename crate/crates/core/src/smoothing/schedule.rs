//! Scaling-parameter schedules `η_t`.

use serde::{Deserialize, Serialize};

use crate::error::{ensure_positive, Error, Result};
use crate::potentials::Norm;

/// Rule producing `η_t` for round `t` (1-based).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EtaSchedule {
    Fixed { eta: f64 },
    /// `√(Σ_{t≤T} ‖θ_t‖∞²)`; needs the whole horizon.
    HindsightExperts,
    /// `√(2(1 + Σ_{s<t} ‖θ_s‖∞²))`.
    AdaptiveExperts,
    /// `√(Σ_{t≤T} ‖θ_t‖₂² / (2N))`; needs the whole horizon.
    HindsightL2,
    /// `√((1 + Σ_{s<t} ‖θ_s‖₂²) / N)`.
    AdaptiveL2,
}

/// Per-round reward norms available to a schedule.
#[derive(Clone, Copy, Debug)]
pub enum NormHistory<'a> {
    /// Rounds `1..t−1` (or more) seen so far; enough for adaptive rules.
    Prefix(&'a [f64]),
    /// The complete horizon, known in advance.
    FullHorizon(&'a [f64]),
}

impl<'a> NormHistory<'a> {
    fn norms(&self) -> &'a [f64] {
        match *self {
            NormHistory::Prefix(n) | NormHistory::FullHorizon(n) => n,
        }
    }
}

impl EtaSchedule {
    /// Norm in which the schedule reads reward history; `None` for fixed.
    pub fn norm(&self) -> Option<Norm> {
        match self {
            EtaSchedule::Fixed { .. } => None,
            EtaSchedule::HindsightExperts | EtaSchedule::AdaptiveExperts => Some(Norm::Linf),
            EtaSchedule::HindsightL2 | EtaSchedule::AdaptiveL2 => Some(Norm::L2),
        }
    }

    pub fn is_hindsight(&self) -> bool {
        matches!(self, EtaSchedule::HindsightExperts | EtaSchedule::HindsightL2)
    }

    pub fn is_adaptive(&self) -> bool {
        matches!(self, EtaSchedule::AdaptiveExperts | EtaSchedule::AdaptiveL2)
    }

    pub fn validate(&self) -> Result<()> {
        if let EtaSchedule::Fixed { eta } = self {
            ensure_positive(*eta, "fixed eta")?;
        }
        Ok(())
    }

    /// `η_t` for round `t ≥ 1`. Adaptive rules read only `history[..t−1]`.
    ///
    /// A hindsight rule over an all-zero reward sequence returns 1: the
    /// formula gives 0, and any positive value yields zero regret there.
    pub fn next_eta(&self, t: usize, history: NormHistory<'_>, dim: usize) -> Result<f64> {
        self.validate()?;
        if t == 0 {
            return Err(Error::InvalidParameter("rounds are numbered from 1".into()));
        }
        if dim == 0 {
            return Err(Error::InvalidParameter("dimension must be at least 1".into()));
        }
        let norms = history.norms();
        let past_sq = |t: usize| -> Result<f64> {
            if norms.len() < t - 1 {
                return Err(Error::MissingData(format!(
                    "adaptive schedule at round {t} needs {} past norms, got {}",
                    t - 1,
                    norms.len()
                )));
            }
            Ok(norms[..t - 1].iter().map(|x| x * x).sum())
        };
        let full_sq = || -> Result<f64> {
            match history {
                NormHistory::FullHorizon(n) => Ok(n.iter().map(|x| x * x).sum()),
                NormHistory::Prefix(_) => Err(Error::MissingData(
                    "hindsight schedule needs the full reward horizon".into(),
                )),
            }
        };
        let n = dim as f64;
        let eta = match *self {
            EtaSchedule::Fixed { eta } => eta,
            EtaSchedule::AdaptiveExperts => (2.0 * (1.0 + past_sq(t)?)).sqrt(),
            EtaSchedule::AdaptiveL2 => ((1.0 + past_sq(t)?) / n).sqrt(),
            EtaSchedule::HindsightExperts => full_sq()?.sqrt(),
            EtaSchedule::HindsightL2 => (full_sq()? / (2.0 * n)).sqrt(),
        };
        if eta > 0.0 {
            Ok(eta)
        } else {
            Ok(1.0)
        }
    }
}

pub fn next_eta(schedule: &EtaSchedule, t: usize, history: NormHistory<'_>, dim: usize) -> Result<f64> {
    schedule.next_eta(t, history, dim)
}
