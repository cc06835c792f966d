//! `gbpa duality`: the one-dimensional perturbation/regularizer converter.

use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::Context;
use clap::ValueEnum;
use gbpa_core::duality::{
    default_probe_range, ftpl_to_ftrl, ftrl_to_ftpl, gumbel_hedge_check, roundtrip_error, CdfTable, Perturbation,
    RecoveredPerturbation, Regularizer1D, DUALITY_TOLERANCE,
};
use gbpa_core::verify::CheckReport;
use serde_json::json;

use crate::output::write_atomic;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Direction {
    /// Perturbation (built-in name or `x,F` table) to a `w,R` regularizer table.
    ToFtrl,
    /// `w,R` regularizer table to an `x,F` perturbation CDF table.
    ToFtpl,
    /// Perturbation to regularizer and back; reports the sup CDF error.
    Roundtrip,
    /// Gumbel-argmax frequencies against softmax.
    GumbelHedge,
}

#[derive(Clone, Debug)]
pub struct DualityOptions {
    pub direction: Direction,
    pub source: Option<String>,
    pub resolution: usize,
    pub probes: usize,
    pub range: Option<(f64, f64)>,
    pub theta: Vec<f64>,
    pub eta: f64,
    pub samples: usize,
    pub seed: u64,
    pub output: PathBuf,
}

/// A built-in distribution name, or else a path to an `x,F` table.
pub fn load_perturbation(source: &str) -> anyhow::Result<Perturbation> {
    if let Some(p) = Perturbation::builtin(source) {
        return Ok(p);
    }
    let table = CdfTable::from_path(Path::new(source))
        .with_context(|| format!("`{source}` is neither a built-in distribution nor a readable x,F table"))?;
    Ok(Perturbation::Table(table))
}

fn source(opts: &DualityOptions) -> anyhow::Result<&str> {
    opts.source.as_deref().context("this direction needs a distribution name or table path")
}

fn grid(range: (f64, f64), points: usize) -> impl Iterator<Item = f64> {
    let (lo, hi) = range;
    (0..points).map(move |i| lo + (hi - lo) * i as f64 / (points - 1).max(1) as f64)
}

fn write_cdf(path: &Path, recovered: &RecoveredPerturbation, range: (f64, f64), points: usize) -> anyhow::Result<f64> {
    let mut worst_drop: f64 = 0.0;
    write_atomic(path, |f| {
        writeln!(f, "x,F")?;
        let mut last = f64::NEG_INFINITY;
        for x in grid(range, points) {
            let v = recovered.cdf(x);
            worst_drop = worst_drop.max(last - v);
            last = v;
            writeln!(f, "{x},{v}")?;
        }
        Ok(())
    })?;
    Ok(worst_drop)
}

/// Runs one conversion, writes its table to `opts.output` and returns the report.
pub fn run_duality(opts: &DualityOptions) -> anyhow::Result<CheckReport> {
    if opts.probes < 2 {
        anyhow::bail!("--probes must be at least 2");
    }
    Ok(match opts.direction {
        Direction::ToFtrl => {
            let pert = load_perturbation(source(opts)?)?;
            let reg = ftpl_to_ftrl(&pert, opts.resolution)?;
            write_atomic(&opts.output, |f| Ok(reg.write_table(f)?))?;
            CheckReport::new("to-ftrl/convexity", -reg.min_second_difference(), 0.0, 0.0).with_config(json!({
                "perturbation": pert,
                "resolution": opts.resolution,
                "r_at_half": reg.value_at(0.5),
                "r_at_one": reg.value_at(1.0),
                "output": opts.output,
            }))
        }
        Direction::ToFtpl => {
            let path = source(opts)?;
            let file = std::fs::File::open(path).with_context(|| format!("opening {path}"))?;
            let reg = Regularizer1D::from_reader(file)?;
            let recovered = ftrl_to_ftpl(&reg)?;
            let range = opts.range.unwrap_or((-10.0, 10.0));
            let drop = write_cdf(&opts.output, &recovered, range, opts.probes)?;
            CheckReport::new("to-ftpl/monotone", drop, 0.0, 0.0).with_config(json!({
                "regularizer": path,
                "resolution": reg.resolution(),
                "range": [range.0, range.1],
                "probes": opts.probes,
                "output": opts.output,
            }))
        }
        Direction::Roundtrip => {
            let pert = load_perturbation(source(opts)?)?;
            let range = opts.range.unwrap_or_else(|| default_probe_range(&pert));
            let err = roundtrip_error(&pert, opts.resolution, range, opts.probes)?;
            let recovered = ftrl_to_ftpl(&ftpl_to_ftrl(&pert, opts.resolution)?)?;
            write_cdf(&opts.output, &recovered, range, opts.probes)?;
            CheckReport::new("roundtrip/sup-cdf-error", err, DUALITY_TOLERANCE, 0.0).with_config(json!({
                "perturbation": pert,
                "resolution": opts.resolution,
                "range": [range.0, range.1],
                "probes": opts.probes,
                "output": opts.output,
            }))
        }
        Direction::GumbelHedge => {
            let check = gumbel_hedge_check(&opts.theta, opts.eta, opts.samples, opts.seed)?;
            write_atomic(&opts.output, |f| {
                writeln!(f, "softmax,frequency")?;
                for (p, q) in check.softmax.iter().zip(&check.frequency) {
                    writeln!(f, "{p},{q}")?;
                }
                Ok(())
            })?;
            check.report()
        }
    })
}
