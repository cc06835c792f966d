//! `gbpa run`: play every seed of an experiment and persist traces.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::Context;
use gbpa_core::gbpa::{decompose_regret, run_game, write_trace_csv, LedgerSummary};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;
use crate::output::{write_atomic, write_json};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SeedResult {
    pub seed: u64,
    pub ledger: LedgerSummary,
    pub trace_file: PathBuf,
    pub wall_clock_secs: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunSummary {
    pub config: ExperimentConfig,
    pub seeds: Vec<SeedResult>,
    pub mean_regret: f64,
    /// Largest `|realized − reconstructed|` over seeds.
    pub max_abs_residual: f64,
    pub bound_checks: usize,
    pub violations: usize,
    pub passed: bool,
}

pub fn trace_file_name(seed: u64) -> String {
    format!("trace_seed{seed}.csv")
}

/// Runs all seeds in parallel; each seed writes its own trace atomically.
/// The resolved config is saved next to the summary.
pub fn run_experiment(config: &ExperimentConfig, out_dir: &Path) -> anyhow::Result<RunSummary> {
    config.validate()?;
    let set = config.decision_set()?;
    let potential = config.potential_spec()?;
    let schedule = config.eta_schedule();
    let seeds = config
        .seeds
        .par_iter()
        .map(|&seed| -> anyhow::Result<SeedResult> {
            let start = Instant::now();
            let adversary = config.adversary(seed)?;
            let trace = run_game(&set, potential, schedule, &adversary, config.horizon, seed)
                .with_context(|| format!("seed {seed}"))?;
            let ledger = decompose_regret(&trace).with_context(|| format!("seed {seed}"))?;
            let trace_file = out_dir.join(trace_file_name(seed));
            write_atomic(&trace_file, |f| Ok(write_trace_csv(&trace, &ledger, f)?))?;
            Ok(SeedResult {
                seed,
                ledger: LedgerSummary::new(&trace, &ledger),
                trace_file,
                wall_clock_secs: start.elapsed().as_secs_f64(),
            })
        })
        .collect::<anyhow::Result<Vec<_>>>()?;
    let mean_regret = seeds.iter().map(|s| s.ledger.realized_regret).sum::<f64>() / seeds.len() as f64;
    let max_abs_residual = seeds.iter().map(|s| s.ledger.residual.abs()).fold(0.0, f64::max);
    let verdicts: Vec<bool> = seeds.iter().filter_map(|s| s.ledger.within_bound).collect();
    let violations = verdicts.iter().filter(|ok| !**ok).count();
    let summary = RunSummary {
        config: config.clone(),
        mean_regret,
        max_abs_residual,
        bound_checks: verdicts.len(),
        violations,
        passed: violations == 0,
        seeds,
    };
    let resolved = config.to_toml()?;
    write_atomic(&out_dir.join("config.toml"), |f| Ok(f.write_all(resolved.as_bytes())?))?;
    write_json(&out_dir.join("summary.json"), &summary)?;
    Ok(summary)
}
