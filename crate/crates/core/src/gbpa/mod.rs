//! The gradient-based prediction game: the learner plays `w_t = ∇Φ_t(Θ_{t−1})`
//! against an adversary, and the regret is split into underestimation,
//! overestimation and divergence penalties.

mod adversary;
mod bounds;
mod game;
mod io;
mod ledger;

pub use adversary::{adversary_next, AdversaryConfig, AdversaryKind};
pub use bounds::{smoothness_parameter, theoretical_bound, BoundSetting};
pub use game::{run_game, GameTrace, PotentialSpec, Round};
pub use io::{write_trace_csv, LedgerSummary};
pub use ledger::{decompose_regret, RegretLedger};
