//! Experiment configuration files (TOML).
//!
//! ```toml
//! setting = "experts"          # experts | l2ball | interval
//! n = 10
//! horizon = 1000
//! potential = "gaussian-mc"    # ftl | ftrl-entropy | ftrl-quadratic | gaussian-mc
//! schedule = "adaptive"        # adaptive | hindsight | fixed:<eta>
//! mc_samples = 2000            # gaussian-mc only
//! seeds = [1, 2, 3]
//! output_dir = "out"           # optional
//!
//! [adversary]
//! kind = "rademacher"          # fixed | rademacher | gaussian | greedy
//! budget = 1.0                 # optional, defaults to 1
//! seed = 7                     # optional, defaults to the run seed
//! rewards = [[1.0, 0.0]]       # fixed only
//! ```
//!
//! Unknown keys are rejected.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{bail, Context};
use gbpa_core::gbpa::{AdversaryConfig, AdversaryKind, PotentialSpec};
use gbpa_core::potentials::DecisionSet;
use gbpa_core::smoothing::EtaSchedule;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Setting {
    Experts,
    L2ball,
    Interval,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PotentialName {
    Ftl,
    FtrlEntropy,
    FtrlQuadratic,
    GaussianMc,
}

/// `adaptive`, `hindsight` or `fixed:<eta>`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ScheduleName {
    Adaptive,
    Hindsight,
    Fixed(f64),
}

impl FromStr for ScheduleName {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "adaptive" => Ok(Self::Adaptive),
            "hindsight" => Ok(Self::Hindsight),
            _ => {
                let eta = s
                    .strip_prefix("fixed:")
                    .ok_or_else(|| format!("unknown schedule `{s}`; expected adaptive, hindsight or fixed:<eta>"))?;
                let eta: f64 = eta.trim().parse().map_err(|_| format!("invalid eta in `{s}`"))?;
                if !(eta.is_finite() && eta > 0.0) {
                    return Err(format!("eta must be positive in `{s}`"));
                }
                Ok(Self::Fixed(eta))
            }
        }
    }
}

impl fmt::Display for ScheduleName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Adaptive => f.write_str("adaptive"),
            Self::Hindsight => f.write_str("hindsight"),
            Self::Fixed(eta) => write!(f, "fixed:{eta}"),
        }
    }
}

impl Serialize for ScheduleName {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ScheduleName {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AdversaryName {
    Fixed,
    Rademacher,
    Gaussian,
    Greedy,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AdversarySection {
    pub kind: AdversaryName,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rewards: Option<Vec<Vec<f64>>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub setting: Setting,
    #[serde(default = "one")]
    pub n: usize,
    pub horizon: usize,
    pub potential: PotentialName,
    pub schedule: ScheduleName,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mc_samples: Option<usize>,
    pub seeds: Vec<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    pub adversary: AdversarySection,
}

fn one() -> usize {
    1
}

impl ExperimentConfig {
    pub fn from_path(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("in {}", path.display()))
    }

    /// Parses and validates; parse errors carry line and column.
    pub fn parse(text: &str) -> anyhow::Result<Self> {
        let config: Self = toml::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn to_toml(&self) -> anyhow::Result<String> {
        Ok(toml::to_string(self)?)
    }

    pub fn decision_set(&self) -> anyhow::Result<DecisionSet> {
        Ok(match self.setting {
            Setting::Experts => DecisionSet::simplex(self.n)?,
            Setting::L2ball => DecisionSet::l2_ball(self.n)?,
            Setting::Interval => {
                if self.n != 1 {
                    bail!("the interval setting is one-dimensional; got n = {}", self.n);
                }
                DecisionSet::interval01()
            }
        })
    }

    pub fn potential_spec(&self) -> anyhow::Result<PotentialSpec> {
        Ok(match (self.potential, self.mc_samples) {
            (PotentialName::GaussianMc, Some(samples)) => PotentialSpec::GaussianMc { samples },
            (PotentialName::GaussianMc, None) => bail!("gaussian-mc needs `mc_samples`"),
            (_, Some(_)) => bail!("`mc_samples` only applies to gaussian-mc"),
            (PotentialName::Ftl, None) => PotentialSpec::Baseline,
            (PotentialName::FtrlEntropy, None) => PotentialSpec::EntropicFtrl,
            (PotentialName::FtrlQuadratic, None) => PotentialSpec::QuadraticFtrl,
        })
    }

    pub fn eta_schedule(&self) -> EtaSchedule {
        let experts = self.setting == Setting::Experts;
        match self.schedule {
            ScheduleName::Fixed(eta) => EtaSchedule::Fixed { eta },
            ScheduleName::Adaptive if experts => EtaSchedule::AdaptiveExperts,
            ScheduleName::Adaptive => EtaSchedule::AdaptiveL2,
            ScheduleName::Hindsight if experts => EtaSchedule::HindsightExperts,
            ScheduleName::Hindsight => EtaSchedule::HindsightL2,
        }
    }

    /// Adversary for the game seeded with `run_seed`.
    pub fn adversary(&self, run_seed: u64) -> anyhow::Result<AdversaryConfig> {
        let a = &self.adversary;
        let seed = a.seed.unwrap_or(run_seed);
        let kind = match (a.kind, &a.rewards) {
            (AdversaryName::Fixed, Some(rewards)) => AdversaryKind::FixedSequence { rewards: rewards.clone() },
            (AdversaryName::Fixed, None) => bail!("the fixed adversary needs `rewards`"),
            (_, Some(_)) => bail!("`rewards` only applies to the fixed adversary"),
            (AdversaryName::Rademacher, None) => AdversaryKind::IidRademacher { seed },
            (AdversaryName::Gaussian, None) => AdversaryKind::IidGaussianClipped { seed },
            (AdversaryName::Greedy, None) => AdversaryKind::GreedyAdaptive,
        };
        Ok(AdversaryConfig::new(kind, a.budget.unwrap_or(1.0)))
    }

    /// Rejects every combination `run_game` would refuse, before any game runs.
    pub fn validate(&self) -> anyhow::Result<()> {
        if self.seeds.is_empty() {
            bail!("`seeds` must list at least one seed");
        }
        let set = self.decision_set()?;
        let potential = self.potential_spec()?;
        potential.check_compatible(&set)?;
        let schedule = self.eta_schedule();
        schedule.validate()?;
        let adversary = self.adversary(self.seeds[0])?;
        adversary.validate(&set)?;
        if schedule.is_hindsight() && !adversary.is_oblivious() {
            bail!(
                "incompatible configuration: the hindsight schedule needs the whole reward sequence in advance, \
                 but the greedy adversary reacts to the learner"
            );
        }
        if let AdversaryKind::FixedSequence { rewards } = &adversary.kind {
            if rewards.len() < self.horizon {
                bail!("the fixed adversary lists {} rewards but horizon is {}", rewards.len(), self.horizon);
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const EXPERTS: &str = r#"
setting = "experts"
n = 10
horizon = 1000
potential = "gaussian-mc"
schedule = "adaptive"
mc_samples = 2000
seeds = [1, 2]

[adversary]
kind = "rademacher"
"#;

    #[test]
    fn parses_and_round_trips() {
        let c = ExperimentConfig::parse(EXPERTS).unwrap();
        assert_eq!(c.eta_schedule(), EtaSchedule::AdaptiveExperts);
        assert_eq!(c.potential_spec().unwrap(), PotentialSpec::GaussianMc { samples: 2000 });
        let back = ExperimentConfig::parse(&c.to_toml().unwrap()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn fixed_schedule_round_trips() {
        let text = EXPERTS.replace("\"adaptive\"", "\"fixed:0.25\"");
        let c = ExperimentConfig::parse(&text).unwrap();
        assert_eq!(c.schedule, ScheduleName::Fixed(0.25));
        assert_eq!(ExperimentConfig::parse(&c.to_toml().unwrap()).unwrap(), c);
    }

    #[test]
    fn unknown_key_reports_line() {
        let text = EXPERTS.replace("horizon = 1000", "horizon = 1000\nhorizn = 5");
        let err = format!("{:#}", ExperimentConfig::parse(&text).unwrap_err());
        assert!(err.contains("horizn"), "{err}");
        assert!(err.contains("line 5"), "{err}");
    }

    #[test]
    fn hindsight_with_greedy_is_rejected() {
        let text = EXPERTS.replace("\"adaptive\"", "\"hindsight\"").replace("\"rademacher\"", "\"greedy\"");
        let err = ExperimentConfig::parse(&text).unwrap_err().to_string();
        assert!(err.contains("hindsight"), "{err}");
    }

    #[test]
    fn incompatible_potential_is_rejected() {
        let text = EXPERTS.replace("\"gaussian-mc\"", "\"ftrl-quadratic\"").replace("mc_samples = 2000\n", "");
        assert!(ExperimentConfig::parse(&text).is_err());
    }

    #[test]
    fn bad_schedule_strings() {
        for s in ["fixed:", "fixed:-1", "fixed:abc", "sometimes"] {
            assert!(s.parse::<ScheduleName>().is_err(), "{s}");
        }
    }
}
