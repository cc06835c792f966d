//! CSV traces and JSON summaries.

use std::io::Write;

use serde::{Deserialize, Serialize};

use super::game::{GameTrace, PotentialSpec};
use super::ledger::RegretLedger;
use crate::error::{Error, Result};
use crate::smoothing::EtaSchedule;

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::InvalidParameter(format!("csv: {e}"))
    }
}

/// One row per round: `t, eta, theta_1..N, w_1..N, reward, cum_regret,
/// divergence, overestimation`.
pub fn write_trace_csv<W: Write>(trace: &GameTrace, ledger: &RegretLedger, out: W) -> Result<()> {
    if ledger.divergence.len() != trace.horizon() {
        return Err(Error::DimensionMismatch { expected: trace.horizon(), got: ledger.divergence.len() });
    }
    let n = trace.set.dim();
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["t".to_string(), "eta".to_string()];
    header.extend((1..=n).map(|i| format!("theta_{i}")));
    header.extend((1..=n).map(|i| format!("w_{i}")));
    header.extend(["reward", "cum_regret", "divergence", "overestimation"].map(String::from));
    w.write_record(&header)?;
    let mut total = 0.0;
    for (k, r) in trace.rounds.iter().enumerate() {
        total += r.reward;
        let cum_regret = trace.set.support(&r.cumulative) - total;
        let mut row = vec![r.t.to_string(), r.eta.to_string()];
        row.extend(r.theta.iter().map(f64::to_string));
        row.extend(r.w.iter().map(f64::to_string));
        row.extend(
            [r.reward, cum_regret, ledger.divergence[k], ledger.overestimation[k]].iter().map(f64::to_string),
        );
        w.write_record(&row)?;
    }
    w.flush().map_err(|e| Error::InvalidParameter(format!("csv: {e}")))?;
    Ok(())
}

/// Totals of one game, for JSON reporting.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LedgerSummary {
    pub root_seed: u64,
    pub horizon: usize,
    pub potential: PotentialSpec,
    pub schedule: EtaSchedule,
    pub realized_regret: f64,
    pub realized_std_error: f64,
    pub underestimation: f64,
    pub overestimation: f64,
    pub divergence: f64,
    pub residual: f64,
    pub bound: Option<f64>,
    pub within_bound: Option<bool>,
}

impl LedgerSummary {
    pub fn new(trace: &GameTrace, ledger: &RegretLedger) -> Self {
        Self {
            root_seed: trace.root_seed,
            horizon: trace.horizon(),
            potential: trace.potential,
            schedule: trace.schedule,
            realized_regret: ledger.realized_regret,
            realized_std_error: ledger.realized_std_error,
            underestimation: ledger.underestimation,
            overestimation: ledger.total_overestimation(),
            divergence: ledger.total_divergence(),
            residual: ledger.residual(),
            bound: ledger.bound,
            within_bound: ledger.within_bound(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gbpa::{decompose_regret, run_game, AdversaryConfig, AdversaryKind};
    use crate::potentials::DecisionSet;

    #[test]
    fn csv_layout_and_round_trip() {
        let set = DecisionSet::simplex(2).unwrap();
        let adv = AdversaryConfig::new(AdversaryKind::IidRademacher { seed: 1 }, 1.0);
        let trace = run_game(&set, PotentialSpec::EntropicFtrl, EtaSchedule::AdaptiveExperts, &adv, 5, 2).unwrap();
        let ledger = decompose_regret(&trace).unwrap();
        let mut buf = Vec::new();
        write_trace_csv(&trace, &ledger, &mut buf).unwrap();
        let mut reader = csv::Reader::from_reader(buf.as_slice());
        let header: Vec<String> = reader.headers().unwrap().iter().map(String::from).collect();
        assert_eq!(
            header,
            ["t", "eta", "theta_1", "theta_2", "w_1", "w_2", "reward", "cum_regret", "divergence", "overestimation"]
        );
        let rows: Vec<csv::StringRecord> = reader.records().map(|r| r.unwrap()).collect();
        assert_eq!(rows.len(), 5);
        let last_regret: f64 = rows[4][7].parse().unwrap();
        assert_eq!(last_regret, ledger.realized_regret);
        let eta: f64 = rows[2][1].parse().unwrap();
        assert_eq!(eta, trace.rounds[2].eta);
    }

    #[test]
    fn summary_serializes() {
        let set = DecisionSet::simplex(2).unwrap();
        let adv = AdversaryConfig::new(AdversaryKind::IidRademacher { seed: 1 }, 1.0);
        let trace = run_game(&set, PotentialSpec::EntropicFtrl, EtaSchedule::AdaptiveExperts, &adv, 5, 2).unwrap();
        let ledger = decompose_regret(&trace).unwrap();
        let s = LedgerSummary::new(&trace, &ledger);
        let json = serde_json::to_string(&s).unwrap();
        let back: LedgerSummary = serde_json::from_str(&json).unwrap();
        assert_eq!(back, s);
    }
}
