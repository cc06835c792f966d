//! One-dimensional correspondence between perturbations and regularizers.
//!
//! Over the decision set [0, 1], FTPL with noise `u ∼ D` plays
//! `P[u > −Θ]`. The regularizer `R(w) − R(0) = −∫₀^w F⁻¹(1 − z) dz` makes
//! FTRL play the same action, and conversely `(R*)′` recovers the noise.

mod checks;
mod perturbation;
mod regularizer;

pub use checks::{
    check_derivative_identity, check_potential_equality, draw_perturbations, gumbel_hedge_check, GumbelHedgeReport,
    DUALITY_TOLERANCE,
};
pub use perturbation::{gumbel_from_uniform, CdfTable, Perturbation};
pub use regularizer::{
    default_probe_range, ftpl_to_ftrl, ftrl_to_ftpl, roundtrip_error, RecoveredPerturbation, Regularizer1D,
    MIN_RESOLUTION,
};
