//! Acceptance suite: twelve criteria, one PASS/FAIL line each.
//!
//! Runs as a plain binary under `cargo test` so the verdict lines are always
//! printed. Any failing criterion makes the process exit nonzero.

use std::time::{Duration, Instant};

use rand::Rng;

use gbpa_core::duality::{
    check_potential_equality, default_probe_range, ftpl_to_ftrl, gumbel_hedge_check, roundtrip_error, Perturbation,
};
use gbpa_core::gbpa::{decompose_regret, run_game, AdversaryConfig, AdversaryKind, GameTrace, PotentialSpec};
use gbpa_core::potentials::DecisionSet;
use gbpa_core::rng::{GaussianDraws, NoiseStream, Purpose};
use gbpa_core::smoothing::{EtaSchedule, GaussianSmoothingConfig, SmoothedPotential};
use gbpa_core::verify::{
    check_generic_smoothing, check_gradient_fd, check_hessian_experts_bound, check_hessian_l2_bound,
    check_max_gaussian, check_overestimation_telescope, experts_certificates, CheckReport,
};

const IDENTITY_TOLERANCE: f64 = 1e-9;
const EXPERTS_BOUND: f64 = 192.03;
const L2_BOUND: f64 = 44.77;
const DUALITY_TOLERANCE: f64 = 1e-3;
const FD_TOLERANCE: f64 = 1e-6;
const FTL_REGRET_FRACTION: f64 = 0.4;
const SQRT_2_OVER_PI: f64 = 0.797_884_560_802_865_4;
const INV_SQRT_PI: f64 = 0.564_189_583_547_756_3;

type Verdict = anyhow::Result<(bool, String)>;

struct Outcome {
    passed: bool,
}

fn criterion(id: u32, title: &str, limit_secs: u64, body: impl FnOnce() -> Verdict) -> Outcome {
    let start = Instant::now();
    let result = body();
    let elapsed = start.elapsed();
    let limit = Duration::from_secs(limit_secs);
    let (ok, detail) = match result {
        Ok(v) => v,
        Err(e) => (false, format!("error: {e:#}")),
    };
    let in_time = elapsed < limit;
    let passed = ok && in_time;
    println!(
        "{} criterion {id:02} {title}: {detail} [{:.2} s, limit {limit_secs} s{}]",
        if passed { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64(),
        if in_time { "" } else { ", over time" },
    );
    Outcome { passed }
}

fn gaussian_vector(dim: usize, seed: u64) -> Vec<f64> {
    GaussianDraws::generate(NoiseStream::new(seed).purpose(Purpose::Probe), 1, dim).row(0).to_vec()
}

fn uniform01(seed: u64) -> f64 {
    NoiseStream::new(seed).purpose(Purpose::Probe).rng().random()
}

fn failing_paths(reports: &[CheckReport]) -> Vec<String> {
    reports.iter().flat_map(CheckReport::failures).collect()
}

fn regret_identity() -> Verdict {
    let mut worst: f64 = 0.0;
    let dims = [2, 5, 10];
    for k in 0..50u64 {
        let n = dims[k as usize % 3];
        let set = DecisionSet::simplex(n)?;
        let kind = match k % 3 {
            0 => AdversaryKind::IidRademacher { seed: k },
            1 => AdversaryKind::IidGaussianClipped { seed: k },
            _ => AdversaryKind::GreedyAdaptive,
        };
        let schedule = if k % 2 == 0 {
            EtaSchedule::AdaptiveExperts
        } else {
            EtaSchedule::Fixed { eta: 0.5 + 2.0 * uniform01(1000 + k) }
        };
        let adversary = AdversaryConfig::new(kind, 0.5 + uniform01(2000 + k));
        let trace = run_game(&set, PotentialSpec::EntropicFtrl, schedule, &adversary, 100, k)?;
        worst = worst.max(decompose_regret(&trace)?.residual().abs());
    }
    Ok((worst <= IDENTITY_TOLERANCE, format!("50 games, max |residual| = {worst:.3e} <= {IDENTITY_TOLERANCE:e}")))
}

fn adaptive_games(
    set: &DecisionSet,
    schedule: EtaSchedule,
    adversary: impl Fn(u64) -> AdversaryKind,
    horizon: usize,
    target: f64,
) -> Verdict {
    let mut worst_margin = f64::NEG_INFINITY;
    let mut all = true;
    let mut max_regret = f64::NEG_INFINITY;
    for seed in 1..=20u64 {
        let adv = AdversaryConfig::new(adversary(seed), 1.0);
        let trace = run_game(set, PotentialSpec::GaussianMc { samples: 2000 }, schedule, &adv, horizon, seed)?;
        let ledger = decompose_regret(&trace)?;
        let bound = ledger.bound.ok_or_else(|| anyhow::anyhow!("no bound attached"))?;
        anyhow::ensure!((bound - target).abs() < 0.01, "bound {bound} differs from {target}");
        let ok = ledger.realized_regret <= bound + 3.0 * ledger.realized_std_error;
        all &= ok;
        max_regret = max_regret.max(ledger.realized_regret);
        worst_margin = worst_margin.max(ledger.realized_regret - bound - 3.0 * ledger.realized_std_error);
    }
    Ok((all, format!("20 seeds, max regret {max_regret:.2} vs bound {target}, worst margin {worst_margin:.2}")))
}

fn experts_bound() -> Verdict {
    adaptive_games(
        &DecisionSet::simplex(10)?,
        EtaSchedule::AdaptiveExperts,
        |seed| AdversaryKind::IidRademacher { seed },
        1000,
        EXPERTS_BOUND,
    )
}

fn l2_bound() -> Verdict {
    adaptive_games(
        &DecisionSet::l2_ball(5)?,
        EtaSchedule::AdaptiveL2,
        |seed| AdversaryKind::IidGaussianClipped { seed },
        500,
        L2_BOUND,
    )
}

fn hessian_experts() -> Verdict {
    let mut gated_failures = Vec::new();
    let mut off_diagonal_failures = 0;
    let mut worst = f64::NEG_INFINITY;
    let mut count = 0;
    for (k, n) in [2usize, 5, 10, 50].into_iter().enumerate() {
        for (j, eta) in [0.5, 1.0, 2.0].into_iter().enumerate() {
            for random in [false, true] {
                let seed = (100 * k + 10 * j + usize::from(random)) as u64;
                let theta = if random { gaussian_vector(n, seed) } else { vec![0.0; n] };
                let r = check_hessian_experts_bound(n, &theta, eta, 100_000, seed)?;
                count += 1;
                worst = worst.max(r.margin() / r.bound);
                let tag = format!("N={n},eta={eta},random={random}");
                if r.measured > r.bound + 3.0 * r.std_error {
                    gated_failures.push(format!("{tag}: bound"));
                }
                for sub in &r.sub {
                    match sub.name.as_str() {
                        "off_diagonal" => off_diagonal_failures += usize::from(!sub.passed()),
                        _ if !sub.passed() => gated_failures.push(format!("{tag}: {}", sub.name)),
                        _ => {}
                    }
                }
            }
        }
    }
    Ok((
        gated_failures.is_empty(),
        format!(
            "{count} configs, worst (measured-bound)/bound = {worst:.3}, gated failures {:?}; \
             diagnostic: off-diagonal sign group failed in {off_diagonal_failures}/{count}",
            gated_failures
        ),
    ))
}

fn hessian_l2() -> Verdict {
    let mut reports = Vec::new();
    let mut one_d = None;
    for n in [1usize, 2, 4, 16] {
        for eta in [1.0, 2.0] {
            let r = check_hessian_l2_bound(n, &vec![0.0; n], eta, 100_000, 50 + n as u64 + eta as u64 * 7)?;
            if n == 1 && eta == 1.0 {
                one_d = Some((r.measured, r.std_error));
            }
            reports.push(r);
        }
    }
    let (m, se) = one_d.expect("grid contains N=1, eta=1");
    let one_d_ok = (m - SQRT_2_OVER_PI).abs() <= 3.0 * se;
    let failures = failing_paths(&reports);
    let worst = reports.iter().map(|r| (r.measured - r.bound) / r.std_error).fold(f64::NEG_INFINITY, f64::max);
    Ok((
        failures.is_empty() && one_d_ok,
        format!(
            "8 configs with ordering sub-checks, worst (measured-bound)/se = {worst:.2}, \
             N=1 eta=1: {m:.4} vs {SQRT_2_OVER_PI:.4} (se {se:.4}), failures {failures:?}"
        ),
    ))
}

fn max_gaussian() -> Verdict {
    let mut reports = Vec::new();
    for (k, n) in [1usize, 2, 32, 1024].into_iter().enumerate() {
        reports.push(check_max_gaussian(n, 1_000_000, 900 + k as u64)?);
    }
    let two = &reports[1];
    let two_ok = (two.measured - INV_SQRT_PI).abs() <= 3.0 * two.std_error;
    let failures = failing_paths(&reports);
    let summary: Vec<String> = reports.iter().map(|r| format!("{:.4}<={:.4}", r.measured, r.bound)).collect();
    Ok((
        failures.is_empty() && two_ok,
        format!("{} ; N=2 {:.4} vs {INV_SQRT_PI:.4} (se {:.1e})", summary.join(", "), two.measured, two.std_error),
    ))
}

fn binary_entropy(w: f64) -> f64 {
    let term = |x: f64| if x > 0.0 { x * x.ln() } else { 0.0 };
    term(w) + term(1.0 - w)
}

fn duality() -> Verdict {
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, pert) in
        [("uniform", Perturbation::Uniform), ("logistic", Perturbation::Logistic), ("gaussian", Perturbation::Gaussian)]
    {
        let err = roundtrip_error(&pert, 1000, default_probe_range(&pert), 2001)?;
        ok &= err <= DUALITY_TOLERANCE;
        parts.push(format!("{name} roundtrip {err:.1e}"));
    }
    for (name, pert, analytic) in [
        ("uniform", Perturbation::Uniform, (|w: f64| 0.5 * w * w - w) as fn(f64) -> f64),
        ("logistic", Perturbation::Logistic, binary_entropy as fn(f64) -> f64),
    ] {
        let reg = ftpl_to_ftrl(&pert, 1000)?;
        let err = (0..=1000).map(|k| (reg.values()[k] - analytic(reg.grid(k))).abs()).fold(0.0, f64::max);
        ok &= err <= DUALITY_TOLERANCE;
        parts.push(format!("{name} regularizer {err:.1e}"));
    }
    let probes = [-3.0, -1.0, -0.25, 0.0, 0.5, 1.0, 2.5];
    for (k, pert) in [Perturbation::Uniform, Perturbation::Logistic, Perturbation::Gaussian].iter().enumerate() {
        let r = check_potential_equality(pert, 1000, &probes, 200_000, 70 + k as u64)?;
        ok &= r.passed();
        parts.push(format!("equality worst margin {:.1e}", r.measured));
    }
    Ok((ok, parts.join(", ")))
}

fn gumbel_hedge() -> Verdict {
    let dims = [2usize, 3, 10];
    let mut worst: f64 = 0.0;
    let mut failures = 0;
    for k in 0..10u64 {
        let n = dims[k as usize % 3];
        let theta = gaussian_vector(n, 300 + k);
        let eta = 0.25 + 2.0 * uniform01(400 + k);
        let r = gumbel_hedge_check(&theta, eta, 100_000, 500 + k)?.report();
        worst = worst.max(r.measured / r.std_error);
        failures += usize::from(!r.passed());
    }
    Ok((failures == 0, format!("10 configs, worst sup-deviation/se = {worst:.2}, failures {failures}")))
}

fn telescope() -> Verdict {
    let mut reports = Vec::new();
    let games: Vec<(DecisionSet, EtaSchedule)> = vec![
        (DecisionSet::simplex(2)?, EtaSchedule::AdaptiveExperts),
        (DecisionSet::simplex(10)?, EtaSchedule::AdaptiveExperts),
        (DecisionSet::l2_ball(5)?, EtaSchedule::AdaptiveL2),
        (DecisionSet::l2_ball(3)?, EtaSchedule::AdaptiveL2),
    ];
    let potential = |set: &DecisionSet| match set.kind() {
        gbpa_core::potentials::SetKind::Simplex { .. } => PotentialSpec::EntropicFtrl,
        _ => PotentialSpec::QuadraticFtrl,
    };
    for (k, (set, schedule)) in games.iter().enumerate() {
        let adv = AdversaryConfig::new(AdversaryKind::IidGaussianClipped { seed: k as u64 }, 1.0);
        let trace: GameTrace = run_game(set, potential(set), *schedule, &adv, 200, 40 + k as u64)?;
        reports.push(check_overestimation_telescope(&trace, 20_000, 60 + k as u64)?);
    }
    let adv = AdversaryConfig::new(AdversaryKind::IidRademacher { seed: 9 }, 1.0);
    let constant = run_game(&DecisionSet::simplex(5)?, PotentialSpec::EntropicFtrl, EtaSchedule::Fixed { eta: 1.5 }, &adv, 200, 9)?;
    let eq = check_overestimation_telescope(&constant, 20_000, 61)?;
    let eq_gap = (eq.measured - eq.bound).abs();
    let eq_ok = eq_gap <= IDENTITY_TOLERANCE * eq.bound.abs().max(1.0);
    let failures = failing_paths(&reports);
    let worst = reports.iter().map(|r| r.measured - r.bound).fold(f64::NEG_INFINITY, f64::max);
    Ok((
        failures.is_empty() && eq_ok,
        format!("4 adaptive games, worst telescoped-bound = {worst:.3}; constant schedule |gap| = {eq_gap:.1e}"),
    ))
}

fn generic_certificate() -> Verdict {
    let mut reports = Vec::new();
    let mut parts = Vec::new();
    for n in [2usize, 5, 10] {
        for (label, set) in [("simplex", DecisionSet::simplex(n)?), ("l2ball", DecisionSet::l2_ball(n)?)] {
            let (c, r) = check_generic_smoothing(&set, 1.0, 20_000, 16, 80 + n as u64)?;
            parts.push(format!("{label} N={n} (alpha {:.3}, beta {:.3})", c.alpha, c.beta));
            reports.push(r);
        }
    }
    let [gauss, hedge] = experts_certificates(10, 1.0, 20_000, 16, 7)?;
    parts.push(format!(
        "diagnostic N=10 linf: gaussian (alpha {:.3}, beta {:.3}) vs hedge (alpha {:.3}, beta {:.3})",
        gauss.certificate.alpha, gauss.certificate.beta, hedge.certificate.alpha, hedge.certificate.beta
    ));
    let failures = failing_paths(&reports);
    Ok((failures.is_empty(), format!("{}; failures {failures:?}", parts.join(", "))))
}

fn ftl_failure() -> Verdict {
    let set = DecisionSet::simplex(2)?;
    let adv = AdversaryConfig::new(AdversaryKind::GreedyAdaptive, 1.0);
    let horizon = 200;
    let ftl = run_game(&set, PotentialSpec::Baseline, EtaSchedule::Fixed { eta: 1.0 }, &adv, horizon, 1)?;
    let ftl_regret = ftl.realized_regret();
    let hedge = run_game(&set, PotentialSpec::EntropicFtrl, EtaSchedule::AdaptiveExperts, &adv, horizon, 1)?;
    let hedge_regret = hedge.realized_regret();
    let norms = hedge.reward_norms(gbpa_core::potentials::Norm::Linf);
    let sq: f64 = norms.iter().map(|x| x * x).sum();
    let bound = 4.0 * ((1.0 + sq) * 2f64.ln()).sqrt();
    let floor = FTL_REGRET_FRACTION * horizon as f64;
    Ok((
        ftl_regret >= floor && hedge_regret <= bound,
        format!("FTL regret {ftl_regret:.1} >= {floor}; Hedge regret {hedge_regret:.2} <= {bound:.2}"),
    ))
}

fn gradients() -> Verdict {
    let mut reports = Vec::new();
    for k in 0..20u64 {
        let n = [2usize, 3, 5, 10][k as usize % 4];
        let eta = 0.5 + 1.5 * uniform01(600 + k);
        let theta: Vec<f64> = gaussian_vector(n, 700 + k).iter().map(|x| 2.0 * x).collect();
        reports.push(check_gradient_fd(&SmoothedPotential::EntropicFtrl { eta }, &theta, 1e-5)?);
        reports.push(check_gradient_fd(&SmoothedPotential::QuadraticFtrl { eta }, &theta, 1e-5)?);
        let set = if k % 2 == 0 { DecisionSet::simplex(n)? } else { DecisionSet::l2_ball(n)? };
        let mc = SmoothedPotential::gaussian(&set, &GaussianSmoothingConfig::new(eta, 20_000, 800 + k)?)?;
        reports.push(check_gradient_fd(&mc, &theta, 1e-3)?);
    }
    let closed_worst = reports
        .iter()
        .filter(|r| r.sub.iter().all(|s| s.std_error == 0.0))
        .flat_map(|r| r.sub.iter().map(|s| s.measured))
        .fold(0.0, f64::max);
    let closed_ok = closed_worst <= FD_TOLERANCE;
    let failures = failing_paths(&reports);
    Ok((
        failures.is_empty() && closed_ok,
        format!("20 probes x 3 potentials, closed-form max error {closed_worst:.1e}; failures {failures:?}"),
    ))
}

fn main() {
    let outcomes = [
        criterion(1, "regret decomposition identity", 5, regret_identity),
        criterion(2, "experts adaptive regret bound", 120, experts_bound),
        criterion(3, "euclidean adaptive regret bound", 120, l2_bound),
        criterion(4, "experts Hessian entry-sum bound", 60, hessian_experts),
        criterion(5, "euclidean Hessian spectral bound", 60, hessian_l2),
        criterion(6, "expected Gaussian maximum", 30, max_gaussian),
        criterion(7, "perturbation/regularizer duality", 30, duality),
        criterion(8, "Gumbel perturbation equals Hedge", 30, gumbel_hedge),
        criterion(9, "overestimation telescope", 30, telescope),
        criterion(10, "generic smoothing certificate", 60, generic_certificate),
        criterion(11, "follow-the-leader linear regret", 10, ftl_failure),
        criterion(12, "gradient consistency", 30, gradients),
    ];
    let failed = outcomes.iter().filter(|o| !o.passed).count();
    println!("acceptance: {} passed, {failed} failed", outcomes.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
