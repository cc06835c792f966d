//! Closed-form regret bounds for Gaussian smoothing.

use serde::{Deserialize, Serialize};

use crate::error::{ensure_positive, Error, Result};
use crate::potentials::{DecisionSet, Norm, SetKind};
use crate::smoothing::EtaSchedule;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BoundSetting {
    /// Simplex decisions, `L∞`-bounded rewards.
    Experts,
    /// Unit ball decisions, `L2`-bounded rewards.
    L2Ball,
    /// Any set whose support function is `lipschitz`-Lipschitz in `L2`.
    GenericL2 { lipschitz: f64 },
}

impl BoundSetting {
    /// The sharpest setting that applies to `set`.
    pub fn for_set(set: &DecisionSet) -> Self {
        match set.kind() {
            SetKind::Simplex { .. } => BoundSetting::Experts,
            SetKind::L2Ball { .. } => BoundSetting::L2Ball,
            _ => BoundSetting::GenericL2 { lipschitz: set.lipschitz_constant(Norm::L2) },
        }
    }

    /// Norm in which per-round rewards enter the bound.
    pub fn norm(&self) -> Norm {
        match self {
            BoundSetting::Experts => Norm::Linf,
            BoundSetting::L2Ball | BoundSetting::GenericL2 { .. } => Norm::L2,
        }
    }
}

/// `β` such that each divergence penalty is at most `(β / 2η_t) ‖θ_t‖²`.
pub fn smoothness_parameter(setting: BoundSetting, dim: usize) -> f64 {
    let n = dim as f64;
    match setting {
        BoundSetting::Experts => 2.0 * (2.0 * n.ln()).sqrt(),
        BoundSetting::L2Ball => 1.0 / n.sqrt(),
        BoundSetting::GenericL2 { lipschitz } => lipschitz,
    }
}

/// Regret bound for the given setting and schedule, from the realized
/// per-round reward norms (measured in `setting.norm()`).
pub fn theoretical_bound(
    setting: BoundSetting,
    schedule: &EtaSchedule,
    norms: &[f64],
    dim: usize,
) -> Result<f64> {
    if dim == 0 {
        return Err(Error::InvalidParameter("dimension must be at least 1".into()));
    }
    schedule.validate()?;
    if norms.iter().any(|x| !x.is_finite() || *x < 0.0) {
        return Err(Error::InvalidParameter("reward norms must be finite and non-negative".into()));
    }
    let n = dim as f64;
    let sq: f64 = norms.iter().map(|x| x * x).sum();
    let log_n = n.ln();
    let bound = match (setting, *schedule) {
        (BoundSetting::Experts, EtaSchedule::AdaptiveExperts) => 4.0 * ((1.0 + sq) * log_n).sqrt(),
        (BoundSetting::Experts, EtaSchedule::HindsightExperts) => 2.0 * (2.0 * sq * log_n).sqrt(),
        (BoundSetting::Experts, EtaSchedule::Fixed { eta }) => (2.0 * log_n).sqrt() * (eta + sq / eta),
        (BoundSetting::L2Ball, EtaSchedule::AdaptiveL2) => 2.0 * (1.0 + sq).sqrt(),
        (BoundSetting::L2Ball, EtaSchedule::HindsightL2) => (2.0 * sq).sqrt(),
        (BoundSetting::L2Ball, EtaSchedule::Fixed { eta }) => eta * n.sqrt() + sq / (2.0 * n.sqrt() * eta),
        (BoundSetting::GenericL2 { lipschitz }, EtaSchedule::Fixed { eta }) => {
            ensure_positive(lipschitz, "lipschitz constant")?;
            eta * lipschitz * n.sqrt() + lipschitz / (2.0 * eta) * sq
        }
        // Tuned scale `η = √(Σ / (2√N))`.
        (BoundSetting::GenericL2 { lipschitz }, EtaSchedule::HindsightL2 | EtaSchedule::HindsightExperts) => {
            ensure_positive(lipschitz, "lipschitz constant")?;
            lipschitz * (2.0 * n.sqrt() * sq).sqrt()
        }
        (setting, schedule) => {
            return Err(Error::Incompatible(format!(
                "no regret bound for schedule {schedule:?} in setting {setting:?}"
            )))
        }
    };
    Ok(bound)
}
