//! `gbpa verify`: run the certification checks over a parameter grid.

use clap::ValueEnum;
use gbpa_core::gbpa::{run_game, AdversaryConfig, AdversaryKind, PotentialSpec};
use gbpa_core::potentials::DecisionSet;
use gbpa_core::rng::{GaussianDraws, NoiseStream, Purpose};
use gbpa_core::smoothing::{EtaSchedule, GaussianSmoothingConfig, SmoothedPotential};
use gbpa_core::verify::{
    check_bregman_sandwich, check_generic_smoothing, check_gradient_fd, check_hessian_experts_bound,
    check_hessian_l2_bound, check_max_gaussian, check_overestimation_telescope, CheckReport,
};
use rayon::prelude::*;
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Selector {
    All,
    Bregman,
    HessianExperts,
    HessianL2,
    Maxgauss,
    Telescope,
    Generic,
    Gradfd,
}

impl Selector {
    const SUITES: [Selector; 7] = [
        Selector::Bregman,
        Selector::HessianExperts,
        Selector::HessianL2,
        Selector::Maxgauss,
        Selector::Telescope,
        Selector::Generic,
        Selector::Gradfd,
    ];

    fn expand(self) -> Vec<Selector> {
        match self {
            Selector::All => Self::SUITES.to_vec(),
            s => vec![s],
        }
    }

    fn default_samples(self) -> usize {
        match self {
            Selector::Maxgauss => 100_000,
            _ => 20_000,
        }
    }

    fn uses_eta(self) -> bool {
        !matches!(self, Selector::Maxgauss)
    }
}

pub const DEFAULT_DIMS: [usize; 4] = [1, 2, 5, 10];
pub const DEFAULT_ETAS: [f64; 3] = [0.5, 1.0, 2.0];
const TELESCOPE_HORIZON: usize = 100;
const SEGMENT_SAMPLES: usize = 17;
const PROBE_COUNT: usize = 8;
const CLOSED_FORM_STEP: f64 = 1e-5;
const MC_STEP: f64 = 1e-3;

#[derive(Clone, Debug, Default)]
pub struct VerifyOptions {
    pub samples: Option<usize>,
    pub seed: u64,
    pub dim: Option<usize>,
    pub eta: Option<f64>,
}

#[derive(Clone, Copy, Debug)]
struct Job {
    suite: Selector,
    dim: usize,
    eta: f64,
    samples: usize,
    seed: u64,
}

fn jobs(selector: Selector, opts: &VerifyOptions) -> Vec<Job> {
    let dims: Vec<usize> = opts.dim.map_or_else(|| DEFAULT_DIMS.to_vec(), |n| vec![n]);
    let etas: Vec<f64> = opts.eta.map_or_else(|| DEFAULT_ETAS.to_vec(), |e| vec![e]);
    let mut out = Vec::new();
    for suite in selector.expand() {
        let suite_etas = if suite.uses_eta() { etas.clone() } else { vec![f64::NAN] };
        for &dim in &dims {
            for &eta in &suite_etas {
                let seed = NoiseStream::new(opts.seed).derive(out.len() as u64).key();
                let samples = opts.samples.unwrap_or_else(|| suite.default_samples());
                out.push(Job { suite, dim, eta, samples, seed });
            }
        }
    }
    out
}

fn gaussian_vector(dim: usize, seed: u64, label: u64) -> Vec<f64> {
    GaussianDraws::generate(NoiseStream::new(seed).purpose(Purpose::Probe).derive(label), 1, dim).row(0).to_vec()
}

fn labelled(report: CheckReport, suite: Selector, label: &str) -> CheckReport {
    let mut report = report;
    let suite = suite.to_possible_value().map(|v| v.get_name().to_owned()).unwrap_or_default();
    report.name = format!("{suite}/{label}");
    report
}

fn run_job(job: Job) -> anyhow::Result<Vec<CheckReport>> {
    let Job { suite, dim, eta, samples, seed } = job;
    let simplex = DecisionSet::simplex(dim)?;
    let ball = DecisionSet::l2_ball(dim)?;
    let mc = |set: &DecisionSet| SmoothedPotential::gaussian(set, &GaussianSmoothingConfig::new(eta, samples, seed)?);
    let theta = gaussian_vector(dim, seed, 0);
    let reports = match suite {
        Selector::Bregman => {
            let v = gaussian_vector(dim, seed, 1);
            vec![
                labelled(check_bregman_sandwich(&SmoothedPotential::EntropicFtrl { eta }, &theta, &v, SEGMENT_SAMPLES)?, suite, "ftrl-entropy"),
                labelled(check_bregman_sandwich(&SmoothedPotential::QuadraticFtrl { eta }, &theta, &v, SEGMENT_SAMPLES)?, suite, "ftrl-quadratic"),
                labelled(check_bregman_sandwich(&mc(&simplex)?, &theta, &v, SEGMENT_SAMPLES)?, suite, "gaussian-mc-simplex"),
            ]
        }
        Selector::HessianExperts => {
            vec![labelled(check_hessian_experts_bound(dim, &theta, eta, samples, seed)?, suite, "random-theta")]
        }
        Selector::HessianL2 => {
            vec![labelled(check_hessian_l2_bound(dim, &vec![0.0; dim], eta, samples, seed)?, suite, "origin")]
        }
        Selector::Maxgauss => vec![labelled(check_max_gaussian(dim, samples, seed)?, suite, "mean-max")],
        Selector::Telescope => {
            let adversary = AdversaryConfig::new(AdversaryKind::IidRademacher { seed }, 1.0);
            let mut out = Vec::new();
            for (label, schedule) in [("adaptive", EtaSchedule::AdaptiveExperts), ("fixed", EtaSchedule::Fixed { eta })] {
                let trace = run_game(&simplex, PotentialSpec::EntropicFtrl, schedule, &adversary, TELESCOPE_HORIZON, seed)?;
                out.push(labelled(check_overestimation_telescope(&trace, samples, seed)?, suite, label));
            }
            out
        }
        Selector::Generic => {
            let mut out = Vec::new();
            for (label, set) in [("simplex", &simplex), ("l2ball", &ball)] {
                let (_, report) = check_generic_smoothing(set, eta, samples, PROBE_COUNT, seed)?;
                out.push(labelled(report, suite, label));
            }
            out
        }
        Selector::Gradfd => vec![
            labelled(check_gradient_fd(&SmoothedPotential::EntropicFtrl { eta }, &theta, CLOSED_FORM_STEP)?, suite, "ftrl-entropy"),
            labelled(check_gradient_fd(&SmoothedPotential::QuadraticFtrl { eta }, &theta, CLOSED_FORM_STEP)?, suite, "ftrl-quadratic"),
            labelled(check_gradient_fd(&mc(&simplex)?, &theta, MC_STEP)?, suite, "gaussian-mc-simplex"),
            labelled(check_gradient_fd(&mc(&ball)?, &theta, MC_STEP)?, suite, "gaussian-mc-l2ball"),
        ],
        Selector::All => unreachable!("expanded before scheduling"),
    };
    Ok(reports)
}

/// Runs the selected checks; reports come back in grid order.
pub fn run_verify(selector: Selector, opts: &VerifyOptions) -> anyhow::Result<Vec<CheckReport>> {
    if opts.samples == Some(0) {
        anyhow::bail!("--samples must be at least 1");
    }
    if opts.dim == Some(0) {
        anyhow::bail!("--N must be at least 1");
    }
    if let Some(eta) = opts.eta {
        if !(eta.is_finite() && eta > 0.0) {
            anyhow::bail!("--eta must be positive");
        }
    }
    let batches = jobs(selector, opts).into_par_iter().map(run_job).collect::<anyhow::Result<Vec<_>>>()?;
    Ok(batches.into_iter().flatten().collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_sizes() {
        let opts = VerifyOptions::default();
        assert_eq!(jobs(Selector::Maxgauss, &opts).len(), 4);
        assert_eq!(jobs(Selector::HessianL2, &opts).len(), 12);
        let pinned = VerifyOptions { dim: Some(4), eta: Some(2.0), ..opts };
        assert_eq!(jobs(Selector::All, &pinned).len(), 7);
    }

    #[test]
    fn hessian_l2_plug_in() {
        let opts = VerifyOptions { samples: Some(2000), seed: 1, dim: Some(4), eta: Some(2.0) };
        let reports = run_verify(Selector::HessianL2, &opts).unwrap();
        assert_eq!(reports.len(), 1);
        assert_eq!(reports[0].bound, 0.25);
        assert_eq!(reports[0].name, "hessian-l2/origin");
    }
}
