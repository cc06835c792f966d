//! Gradient-based prediction for online linear optimization.
//!
//! The learner plays the gradient of a smoothed potential of the cumulative
//! reward. This crate provides the potentials (Gaussian stochastic smoothing
//! and closed-form regularized variants), the game loop with a regret ledger,
//! numerical checks of the smoothing bounds, and a one-dimensional converter
//! between perturbation distributions and regularizers.

pub mod duality;
pub mod error;
pub mod gbpa;
pub mod potentials;
pub mod rng;
pub mod smoothing;
pub mod stats;
pub mod verify;

pub use error::{Error, Result};
