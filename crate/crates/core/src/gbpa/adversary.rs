//! Reward sequences used to drive the game.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, ensure_positive, Error, Result};
use crate::potentials::{dot, DecisionSet, Norm};
use crate::rng::{NoiseStream, Purpose};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AdversaryKind {
    /// Replays `rewards[t − 1]` at round `t`.
    FixedSequence { rewards: Vec<Vec<f64>> },
    /// Independent random signs scaled so that `‖θ_t‖ = budget`: `±r` per
    /// coordinate in `L∞`, `±r/√N` in `L2`.
    IidRademacher { seed: u64 },
    /// A standard Gaussian draw rescaled to norm exactly `budget`.
    IidGaussianClipped { seed: u64 },
    /// Plays toward the extreme point that most increases the instantaneous
    /// regret given the learner's current action.
    GreedyAdaptive,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdversaryConfig {
    #[serde(flatten)]
    pub kind: AdversaryKind,
    /// Bound `r` on `‖θ_t‖` in the decision set's reward norm.
    #[serde(default = "unit_budget")]
    pub budget: f64,
}

fn unit_budget() -> f64 {
    1.0
}

const BUDGET_SLACK: f64 = 1e-12;

impl AdversaryConfig {
    pub fn new(kind: AdversaryKind, budget: f64) -> Self {
        Self { kind, budget }
    }

    /// True when the sequence does not depend on the learner, so it can be
    /// drawn before the game starts.
    pub fn is_oblivious(&self) -> bool {
        !matches!(self.kind, AdversaryKind::GreedyAdaptive)
    }

    pub fn validate(&self, set: &DecisionSet) -> Result<()> {
        ensure_positive(self.budget, "adversary budget")?;
        if let AdversaryKind::FixedSequence { rewards } = &self.kind {
            let norm = set.reward_norm();
            for (i, theta) in rewards.iter().enumerate() {
                set.check_input(theta)?;
                let size = norm.of(theta);
                if size > self.budget * (1.0 + BUDGET_SLACK) {
                    return Err(Error::InvalidParameter(format!(
                        "fixed reward {} has norm {size} above the budget {}",
                        i + 1,
                        self.budget
                    )));
                }
            }
        }
        Ok(())
    }
}

fn rescale(v: &mut [f64], norm: Norm, target: f64) {
    let size = norm.of(v);
    if size > 0.0 {
        let k = target / size;
        v.iter_mut().for_each(|x| *x *= k);
    }
}

/// Direction of length `r` in `norm` that maximizes `⟨d, θ⟩`.
fn steepest(d: &[f64], norm: Norm, r: f64) -> Option<Vec<f64>> {
    let out: Vec<f64> = match norm {
        Norm::Linf => d
            .iter()
            .map(|&x| if x > 0.0 { r } else if x < 0.0 { -r } else { 0.0 })
            .collect(),
        Norm::L2 | Norm::L1 => {
            let size = norm.of(d);
            if size == 0.0 {
                return None;
            }
            if norm == Norm::L2 {
                d.iter().map(|x| r * x / size).collect()
            } else {
                let (i, _) = d
                    .iter()
                    .enumerate()
                    .fold((0, 0.0), |b, (i, x)| if x.abs() > b.1 { (i, x.abs()) } else { b });
                let mut e = vec![0.0; d.len()];
                e[i] = r * d[i].signum();
                e
            }
        }
    };
    out.iter().any(|&x| x != 0.0).then_some(out)
}

fn greedy(set: &DecisionSet, r: f64, cumulative: &[f64], w: &[f64]) -> Vec<f64> {
    let norm = set.reward_norm();
    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut point = vec![0.0; w.len()];
    for target in set.extreme_points() {
        let d: Vec<f64> = target.iter().zip(w).map(|(a, b)| a - b).collect();
        let Some(theta) = steepest(&d, norm, r) else { continue };
        for ((p, c), t) in point.iter_mut().zip(cumulative).zip(&theta) {
            *p = c + t;
        }
        let (leader, _, _) = set.leader(&point);
        let score = leader.dot(&theta) - dot(w, &theta);
        if best.as_ref().is_none_or(|(s, _)| score > *s) {
            best = Some((score, theta));
        }
    }
    best.map(|(_, theta)| theta).unwrap_or_else(|| vec![0.0; w.len()])
}

/// Reward vector for round `t ≥ 1`, given the cumulative reward `Θ_{t−1}` and
/// the learner's action `w_t`. Random kinds draw from a stream keyed by the
/// game's root seed and the adversary's own seed.
pub fn adversary_next(
    adv: &AdversaryConfig,
    set: &DecisionSet,
    t: usize,
    cumulative: &[f64],
    w: &[f64],
    root_seed: u64,
) -> Result<Vec<f64>> {
    if t == 0 {
        return Err(Error::InvalidParameter("rounds are numbered from 1".into()));
    }
    set.check_input(cumulative)?;
    let n = set.dim();
    let norm = set.reward_norm();
    let r = adv.budget;
    let stream = |seed: u64| NoiseStream::new(root_seed).purpose(Purpose::Adversary).derive(seed).round(t);
    let theta = match &adv.kind {
        AdversaryKind::FixedSequence { rewards } => rewards.get(t - 1).cloned().ok_or_else(|| {
            Error::MissingData(format!("fixed sequence has {} rounds, round {t} requested", rewards.len()))
        })?,
        AdversaryKind::IidRademacher { seed } => {
            let mut rng = stream(*seed).rng();
            let scale = match norm {
                Norm::Linf => r,
                Norm::L2 => r / (n as f64).sqrt(),
                Norm::L1 => r / n as f64,
            };
            (0..n).map(|_| if rng.random::<bool>() { scale } else { -scale }).collect()
        }
        AdversaryKind::IidGaussianClipped { seed } => {
            let mut rng = stream(*seed).rng();
            let mut g: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
            rescale(&mut g, norm, r);
            g
        }
        AdversaryKind::GreedyAdaptive => {
            if w.len() != n {
                return Err(Error::DimensionMismatch { expected: n, got: w.len() });
            }
            ensure_finite(w, "learner action")?;
            greedy(set, r, cumulative, w)
        }
    };
    debug_assert!(norm.of(&theta) <= r * (1.0 + 1e-9));
    Ok(theta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rademacher_hits_budget_exactly() {
        let set = DecisionSet::simplex(6).unwrap();
        let adv = AdversaryConfig::new(AdversaryKind::IidRademacher { seed: 3 }, 1.0);
        for t in 1..50 {
            let theta = adversary_next(&adv, &set, t, &[0.0; 6], &[0.0; 6], 9).unwrap();
            assert!(theta.iter().all(|x| x.abs() == 1.0));
        }
        let ball = DecisionSet::l2_ball(4).unwrap();
        let theta = adversary_next(&adv, &ball, 1, &[0.0; 4], &[0.0; 4], 9).unwrap();
        assert!((Norm::L2.of(&theta) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn fixed_sequence_replays() {
        let set = DecisionSet::simplex(2).unwrap();
        let adv = AdversaryConfig::new(
            AdversaryKind::FixedSequence { rewards: vec![vec![1.0, 0.0], vec![0.0, 1.0]] },
            1.0,
        );
        adv.validate(&set).unwrap();
        assert_eq!(adversary_next(&adv, &set, 2, &[1.0, 0.0], &[0.5, 0.5], 0).unwrap(), vec![0.0, 1.0]);
        assert!(adversary_next(&adv, &set, 3, &[1.0, 1.0], &[0.5, 0.5], 0).is_err());
    }

    #[test]
    fn fixed_sequence_over_budget_is_rejected() {
        let set = DecisionSet::simplex(2).unwrap();
        let adv = AdversaryConfig::new(AdversaryKind::FixedSequence { rewards: vec![vec![2.0, 0.0]] }, 1.0);
        assert!(adv.validate(&set).is_err());
    }

    #[test]
    fn greedy_punishes_the_current_leader() {
        let set = DecisionSet::simplex(2).unwrap();
        let adv = AdversaryConfig::new(AdversaryKind::GreedyAdaptive, 1.0);
        let theta = adversary_next(&adv, &set, 1, &[0.0, 0.0], &[1.0, 0.0], 0).unwrap();
        assert_eq!(theta, vec![-1.0, 1.0]);
        let theta = adversary_next(&adv, &set, 2, &[-1.0, 1.0], &[0.0, 1.0], 0).unwrap();
        assert_eq!(theta, vec![1.0, -1.0]);
    }

    #[test]
    fn random_kinds_depend_on_both_seeds() {
        let set = DecisionSet::l2_ball(3).unwrap();
        let a = AdversaryConfig::new(AdversaryKind::IidGaussianClipped { seed: 1 }, 2.0);
        let b = AdversaryConfig::new(AdversaryKind::IidGaussianClipped { seed: 2 }, 2.0);
        let z = [0.0; 3];
        let x = adversary_next(&a, &set, 4, &z, &z, 10).unwrap();
        assert_eq!(x, adversary_next(&a, &set, 4, &z, &z, 10).unwrap());
        assert_ne!(x, adversary_next(&b, &set, 4, &z, &z, 10).unwrap());
        assert_ne!(x, adversary_next(&a, &set, 4, &z, &z, 11).unwrap());
        assert!((Norm::L2.of(&x) - 2.0).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn every_kind_respects_the_budget(
            seed in any::<u64>(),
            t in 1usize..100,
            r in 0.1f64..5.0,
            cum in prop::collection::vec(-10.0f64..10.0, 4),
            raw_w in prop::collection::vec(0.0f64..1.0, 4),
            ball in any::<bool>(),
        ) {
            let set = if ball { DecisionSet::l2_ball(4).unwrap() } else { DecisionSet::simplex(4).unwrap() };
            let total: f64 = raw_w.iter().sum::<f64>().max(1e-9);
            let w: Vec<f64> = if ball {
                raw_w.iter().map(|x| x / 2.0).collect()
            } else {
                raw_w.iter().map(|x| x / total).collect()
            };
            for kind in [
                AdversaryKind::IidRademacher { seed },
                AdversaryKind::IidGaussianClipped { seed },
                AdversaryKind::GreedyAdaptive,
            ] {
                let adv = AdversaryConfig::new(kind, r);
                let theta = adversary_next(&adv, &set, t, &cum, &w, seed).unwrap();
                prop_assert!(set.reward_norm().of(&theta) <= r * (1.0 + 1e-12));
            }
        }
    }
}
