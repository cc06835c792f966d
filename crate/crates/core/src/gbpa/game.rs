//! The game loop.

use serde::{Deserialize, Serialize};

use super::adversary::{adversary_next, AdversaryConfig};
use crate::error::{ensure_positive, Error, Result};
use crate::potentials::{dot, DecisionSet, SetKind};
use crate::rng::{NoiseStream, Purpose};
use crate::smoothing::{EtaSchedule, GaussianSmoothingConfig, NormHistory, SmoothedPotential};

/// Which potential family the learner smooths with; `η` comes from the schedule.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PotentialSpec {
    /// The unsmoothed support function: Follow the Leader.
    Baseline,
    /// Hedge; requires a simplex.
    EntropicFtrl,
    /// Requires a unit ball.
    QuadraticFtrl,
    /// Gaussian smoothing with `samples` fresh draws per round.
    GaussianMc { samples: usize },
}

impl PotentialSpec {
    pub fn check_compatible(&self, set: &DecisionSet) -> Result<()> {
        match (self, set.kind()) {
            (PotentialSpec::EntropicFtrl, SetKind::Simplex { .. })
            | (PotentialSpec::QuadraticFtrl, SetKind::L2Ball { .. })
            | (PotentialSpec::Baseline, _) => Ok(()),
            (PotentialSpec::GaussianMc { samples }, _) => {
                if *samples == 0 {
                    Err(Error::InvalidParameter("samples must be at least 1".into()))
                } else {
                    Ok(())
                }
            }
            (spec, kind) => Err(Error::Incompatible(format!("{spec:?} potential cannot be used over {kind:?}"))),
        }
    }

    pub fn is_exact(&self) -> bool {
        !matches!(self, PotentialSpec::GaussianMc { .. })
    }

    /// `Φ_t` for round `t` at scale `eta`. Gaussian draws for round `t` come
    /// from a sub-stream of `root_seed` reserved for that round.
    pub fn build(&self, set: &DecisionSet, eta: f64, root_seed: u64, t: usize) -> Result<SmoothedPotential> {
        self.check_compatible(set)?;
        ensure_positive(eta, "eta")?;
        Ok(match *self {
            PotentialSpec::Baseline => SmoothedPotential::Baseline(set.clone()),
            PotentialSpec::EntropicFtrl => SmoothedPotential::EntropicFtrl { eta },
            PotentialSpec::QuadraticFtrl => SmoothedPotential::QuadraticFtrl { eta },
            PotentialSpec::GaussianMc { samples } => {
                let seed = NoiseStream::new(root_seed).round(t).purpose(Purpose::Potential).key();
                SmoothedPotential::gaussian(set, &GaussianSmoothingConfig::new(eta, samples, seed)?)?
            }
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Round {
    pub t: usize,
    pub eta: f64,
    pub theta: Vec<f64>,
    /// `Θ_t`, including this round's reward.
    pub cumulative: Vec<f64>,
    pub w: Vec<f64>,
    /// `⟨w_t, θ_t⟩`.
    pub reward: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GameTrace {
    pub set: DecisionSet,
    pub potential: PotentialSpec,
    pub schedule: EtaSchedule,
    pub root_seed: u64,
    pub rounds: Vec<Round>,
}

impl GameTrace {
    pub fn horizon(&self) -> usize {
        self.rounds.len()
    }

    /// `Θ_T`; the zero vector for an empty trace.
    pub fn final_cumulative(&self) -> Vec<f64> {
        self.rounds.last().map_or_else(|| vec![0.0; self.set.dim()], |r| r.cumulative.clone())
    }

    /// `Θ_{t−1}` for round `t ≥ 1`.
    pub fn previous_cumulative(&self, t: usize) -> Vec<f64> {
        if t <= 1 {
            vec![0.0; self.set.dim()]
        } else {
            self.rounds[t - 2].cumulative.clone()
        }
    }

    pub fn total_reward(&self) -> f64 {
        self.rounds.iter().map(|r| r.reward).sum()
    }

    /// `Φ(Θ_T) − Σ_t ⟨w_t, θ_t⟩`.
    pub fn realized_regret(&self) -> f64 {
        self.set.support(&self.final_cumulative()) - self.total_reward()
    }

    /// `‖θ_t‖` per round in the given norm.
    pub fn reward_norms(&self, norm: crate::potentials::Norm) -> Vec<f64> {
        self.rounds.iter().map(|r| norm.of(&r.theta)).collect()
    }

    pub fn etas(&self) -> Vec<f64> {
        self.rounds.iter().map(|r| r.eta).collect()
    }

    /// Checks that cumulative sums are exact and every action lies in `X`.
    pub fn validate(&self) -> Result<()> {
        let mut cum = vec![0.0; self.set.dim()];
        for (i, r) in self.rounds.iter().enumerate() {
            if r.t != i + 1 {
                return Err(Error::InvalidParameter(format!("round {} is numbered {}", i + 1, r.t)));
            }
            if !(r.eta.is_finite() && r.eta > 0.0) {
                return Err(Error::MissingData(format!("round {} has no valid eta", r.t)));
            }
            self.set.check_input(&r.theta)?;
            for (c, x) in cum.iter_mut().zip(&r.theta) {
                *c += x;
            }
            if cum != r.cumulative {
                return Err(Error::InvalidParameter(format!("cumulative reward broken at round {}", r.t)));
            }
            if !self.set.contains(&r.w, 1e-9) {
                return Err(Error::InvalidParameter(format!("action at round {} leaves the decision set", r.t)));
            }
        }
        Ok(())
    }
}

/// Plays `horizon` rounds of `w_t = ∇Φ_t(Θ_{t−1})`.
///
/// Hindsight schedules need the whole reward sequence up front, so they are
/// only accepted against oblivious adversaries, whose rewards are drawn first.
pub fn run_game(
    set: &DecisionSet,
    potential: PotentialSpec,
    schedule: EtaSchedule,
    adversary: &AdversaryConfig,
    horizon: usize,
    root_seed: u64,
) -> Result<GameTrace> {
    if horizon == 0 {
        return Err(Error::InvalidParameter("horizon must be at least 1".into()));
    }
    potential.check_compatible(set)?;
    schedule.validate()?;
    adversary.validate(set)?;
    if schedule.is_hindsight() && !adversary.is_oblivious() {
        return Err(Error::Incompatible(
            "hindsight schedules need the reward sequence in advance; the greedy adversary reacts to the learner"
                .into(),
        ));
    }
    let n = set.dim();
    let norm = schedule.norm().unwrap_or_else(|| set.reward_norm());
    let zeros = vec![0.0; n];

    let predrawn: Option<Vec<Vec<f64>>> = if adversary.is_oblivious() {
        let seq = (1..=horizon)
            .map(|t| adversary_next(adversary, set, t, &zeros, &zeros, root_seed))
            .collect::<Result<Vec<_>>>()?;
        Some(seq)
    } else {
        None
    };
    let horizon_norms: Vec<f64> = predrawn.as_ref().map_or_else(Vec::new, |s| s.iter().map(|x| norm.of(x)).collect());

    let mut norms = Vec::with_capacity(horizon);
    let mut cum = zeros.clone();
    let mut rounds = Vec::with_capacity(horizon);
    for t in 1..=horizon {
        let history = if schedule.is_hindsight() {
            NormHistory::FullHorizon(&horizon_norms)
        } else {
            NormHistory::Prefix(&norms)
        };
        let eta = schedule.next_eta(t, history, n)?;
        let phi = potential.build(set, eta, root_seed, t)?;
        let w = phi.gradient(&cum)?.mean;
        let theta = match &predrawn {
            Some(seq) => seq[t - 1].clone(),
            None => adversary_next(adversary, set, t, &cum, &w, root_seed)?,
        };
        let reward = dot(&w, &theta);
        for (c, x) in cum.iter_mut().zip(&theta) {
            *c += x;
        }
        norms.push(norm.of(&theta));
        rounds.push(Round { t, eta, theta, cumulative: cum.clone(), w, reward });
    }
    Ok(GameTrace { set: set.clone(), potential, schedule, root_seed, rounds })
}
