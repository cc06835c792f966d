//! `gbpa`: experiment runner, verification driver and duality converter.
//!
//! Exit codes: 0 when every check passes, 1 on a bound violation, 2 on a
//! configuration or input error.

mod config;
mod duality;
mod output;
mod run;
mod verify;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use crate::config::ExperimentConfig;
use crate::duality::{run_duality, Direction, DualityOptions};
use crate::output::{resolve_out_dir, write_json};
use crate::verify::{run_verify, Selector, VerifyOptions};

#[derive(Parser)]
#[command(name = "gbpa", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Play every seed of an experiment config; writes per-seed CSV traces and summary.json.
    Run {
        config: PathBuf,
        /// Output directory (overrides the config file and $GBPA_OUT_DIR).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run verification checks and stream one JSON report per line.
    Verify {
        #[arg(value_enum)]
        selector: Selector,
        /// Monte Carlo samples per estimate.
        #[arg(long, visible_alias = "M")]
        samples: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Restrict the grid to one dimension.
        #[arg(long = "N", visible_alias = "n")]
        dim: Option<usize>,
        /// Restrict the grid to one scale.
        #[arg(long)]
        eta: Option<f64>,
        /// Also write all reports as a JSON array to this file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Convert between perturbations and regularizers on [0, 1].
    Duality {
        #[arg(value_enum)]
        direction: Direction,
        /// Built-in distribution (uniform, logistic, gaussian, gumbel) or table path.
        source: Option<String>,
        /// Regularizer grid resolution.
        #[arg(long = "K", default_value_t = 1000)]
        resolution: usize,
        /// Points in emitted CDF tables and round-trip probes.
        #[arg(long, default_value_t = 1001)]
        probes: usize,
        /// CDF window as `lo,hi`.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        range: Option<Vec<f64>>,
        #[arg(long, value_delimiter = ',', default_value = "1,0", allow_hyphen_values = true)]
        theta: Vec<f64>,
        #[arg(long, default_value_t = 1.0)]
        eta: f64,
        #[arg(long, visible_alias = "M", default_value_t = 100_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output table (defaults to `<direction>.csv` in the output directory).
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

enum Verdict {
    Pass,
    Violation,
}

fn execute(cli: Cli) -> anyhow::Result<Verdict> {
    let stdout = std::io::stdout();
    let mut stdout = stdout.lock();
    let passed = match cli.command {
        Command::Run { config, out } => {
            let config = ExperimentConfig::from_path(&config)?;
            let out_dir = resolve_out_dir(out.as_deref(), config.output_dir.as_deref());
            let summary = run::run_experiment(&config, &out_dir)?;
            let line = serde_json::json!({
                "summary": out_dir.join("summary.json"),
                "seeds": summary.seeds.len(),
                "mean_regret": summary.mean_regret,
                "max_abs_residual": summary.max_abs_residual,
                "bound_checks": summary.bound_checks,
                "violations": summary.violations,
                "passed": summary.passed,
            });
            writeln!(stdout, "{line}")?;
            summary.passed
        }
        Command::Verify { selector, samples, seed, dim, eta, out } => {
            let reports = run_verify(selector, &VerifyOptions { samples, seed, dim, eta })?;
            for r in &reports {
                writeln!(stdout, "{}", serde_json::to_string(r)?)?;
            }
            if let Some(path) = out {
                write_json(&path, &reports)?;
            }
            let failed = reports.iter().filter(|r| !r.passed()).count();
            eprintln!("{} checks, {failed} failed", reports.len());
            failed == 0
        }
        Command::Duality { direction, source, resolution, probes, range, theta, eta, samples, seed, out } => {
            let name = direction.to_possible_value().map(|v| v.get_name().to_owned()).unwrap_or_default();
            let output = out.unwrap_or_else(|| resolve_out_dir(None, None).join(format!("{name}.csv")));
            let range = match range.as_deref() {
                None => None,
                Some(&[lo, hi]) => Some((lo, hi)),
                Some(_) => anyhow::bail!("--range takes exactly two values, `lo,hi`"),
            };
            let opts = DualityOptions { direction, source, resolution, probes, range, theta, eta, samples, seed, output };
            let report = run_duality(&opts)?;
            writeln!(stdout, "{}", serde_json::to_string(&report)?)?;
            report.passed()
        }
    };
    Ok(if passed { Verdict::Pass } else { Verdict::Violation })
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(Verdict::Pass) => ExitCode::SUCCESS,
        Ok(Verdict::Violation) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
