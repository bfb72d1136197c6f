//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any FAIL.

mod common;

use std::collections::HashMap;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use common::{audit_path_cover, gnp};
use semirandom_ham::harness::{run_trial, run_trials, TrialConfig, TrialRecord};
use semirandom_ham::replay::{ReplayFile, Verified};
use semirandom_ham::report::Certificate;
use semirandom_ham::rng::cycle_stream;
use semirandom_ham::{
    complete_cycle, compute_budgets, exact_hamilton, strong_core, strong_core_bruteforce,
    verify_hamilton, CycleBudget, Edge, ForcedMatching, Graph, Outcome, ProcessState, SamplingMode,
    Variant,
};

const CORE_GRAPHS: usize = 500;
const CORE_TIME_LIMIT: Duration = Duration::from_secs(10);
const MONOTONE_PAIRS: usize = 100;
const CHI_ROUNDS: u64 = 100_000;
const CHI_MIN_P: f64 = 0.001;
const AUDIT_SEEDS: usize = 20;
const E2E_N: usize = 3000;
const E2E_TRIALS: usize = 10;
const E2E_REQUIRED: usize = 8;
const E2E_TIME_LIMIT: Duration = Duration::from_secs(60);
const CYCLE_INSTANCES: usize = 200;

fn ceil_ln(n: usize) -> usize {
    (n as f64).ln().ceil() as usize
}

struct Verdict {
    id: usize,
    name: &'static str,
    pass: bool,
    detail: String,
}

fn random_small_graph(rng: &mut ChaCha8Rng, i: usize) -> (Graph, f64) {
    let n = rng.gen_range(1..=12);
    let p = [0.2, 0.4, 0.6][i % 3];
    (gnp(n, p, rng.gen()), p)
}

fn c1_core_oracle() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let start = Instant::now();
    let mut mismatches = 0;
    for i in 0..CORE_GRAPHS {
        let (g, _) = random_small_graph(&mut rng, i);
        let k = 1 + i % 4;
        if strong_core(&g, k).black != strong_core_bruteforce(&g, k).unwrap() {
            mismatches += 1;
        }
    }
    let elapsed = start.elapsed();
    Verdict {
        id: 1,
        name: "strong-core oracle equivalence",
        pass: mismatches == 0 && elapsed < CORE_TIME_LIMIT,
        detail: format!(
            "{CORE_GRAPHS} graphs, {mismatches} mismatches, {:.2} s",
            elapsed.as_secs_f64()
        ),
    }
}

fn c2_monotonicity() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut violations = Vec::new();
    let mut tested = 0;
    while tested < MONOTONE_PAIRS {
        let (g, p) = random_small_graph(&mut rng, tested);
        let n = g.n();
        let missing: Vec<Edge> = (0..n)
            .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
            .filter(|&(u, v)| !g.has_edge(u, v))
            .collect();
        let Some(&(a, b)) = missing.choose(&mut rng) else {
            continue;
        };
        let k = 1 + tested % 4;
        let mut h = g.clone();
        h.add_edge(a, b).unwrap();
        let before = strong_core(&g, k).black;
        let after = strong_core(&h, k).black;
        if !before.iter().all(|v| after.contains(v)) {
            violations.push(format!(
                "n={n} p={p} k={k} +({a},{b}): {} -> {}",
                before.len(),
                after.len()
            ));
        }
        tested += 1;
    }
    Verdict {
        id: 2,
        name: "core monotonicity under edge addition",
        pass: violations.is_empty(),
        detail: format!(
            "{} of {MONOTONE_PAIRS} pairs shrink the core{}",
            violations.len(),
            violations
                .first()
                .map(|v| format!("; first: {v}"))
                .unwrap_or_default()
        ),
    }
}

fn c3_uniformity() -> Verdict {
    let mut st = ProcessState::new(6, 2, SamplingMode::Missing, 3).unwrap();
    let mut counts: HashMap<Edge, u64> = HashMap::new();
    for _ in 0..CHI_ROUNDS {
        let r = st.present_round().unwrap();
        for &e in &r.pairs {
            *counts.entry(e).or_default() += 1;
        }
        st.select(&r, None).unwrap();
    }
    let expected = CHI_ROUNDS as f64 * 2.0 / 15.0;
    let stat: f64 = counts
        .values()
        .map(|&c| (c as f64 - expected).powi(2) / expected)
        .sum::<f64>()
        + (15 - counts.len()) as f64 * expected;
    let p = 1.0 - ChiSquared::new(14.0).unwrap().cdf(stat);
    Verdict {
        id: 3,
        name: "sampling uniformity",
        pass: p > CHI_MIN_P,
        detail: format!("chi2 = {stat:.2} on 14 df, p = {p:.4}"),
    }
}

fn audit_records(records: &[TrialRecord]) -> (usize, Vec<String>) {
    let mut successes = 0;
    let mut violations = Vec::new();
    for rec in records.iter().filter(|r| r.report.outcome.is_success()) {
        successes += 1;
        if let Err(e) = audit_path_cover(&rec.report, &rec.selected_log) {
            violations.push(format!("seed {}: {e}", rec.report.params.seed));
        }
    }
    (successes, violations)
}

fn calibrate(cfg: &mut TrialConfig) {
    cfg.seed_density = 5;
    cfg.seed_fraction = Some(0.95);
    cfg.end_cap = Some(5.0);
}

fn c4_path_cover_audit() -> Verdict {
    let mut parts = Vec::new();
    let mut all_violations = Vec::new();
    let mut default_successes = 0;
    for n in [2000, 5000] {
        for k in [1, ceil_ln(n)] {
            for calibrated in [false, true] {
                let mut cfg = TrialConfig::new(n, k);
                cfg.trials = AUDIT_SEEDS;
                cfg.seed = 400;
                if calibrated {
                    calibrate(&mut cfg);
                }
                let set = run_trials(&cfg).unwrap();
                let (s, v) = audit_records(&set.records);
                if !calibrated {
                    default_successes += s;
                }
                parts.push(format!(
                    "n={n} K={k}{} {s}/{AUDIT_SEEDS}",
                    if calibrated { " cal" } else { "" }
                ));
                all_violations.extend(v);
            }
        }
    }
    Verdict {
        id: 4,
        name: "path-cover audit on successful trials",
        pass: all_violations.is_empty(),
        detail: format!(
            "successes {}; {} violations{}{}",
            parts.join(", "),
            all_violations.len(),
            if default_successes == 0 {
                "; default settings audited vacuously"
            } else {
                ""
            },
            all_violations
                .first()
                .map(|v| format!("; first: {v}"))
                .unwrap_or_default()
        ),
    }
}

/// Runs trials one at a time so each can be timed.
fn timed_trials(cfg: &TrialConfig) -> (Vec<TrialRecord>, Duration) {
    let mut slowest = Duration::ZERO;
    let records = (0..cfg.trials)
        .map(|i| {
            let t = Instant::now();
            let r = run_trial(cfg, i).unwrap();
            slowest = slowest.max(t.elapsed());
            r
        })
        .collect();
    (records, slowest)
}

fn outcome_summary(records: &[TrialRecord]) -> String {
    let mut by: HashMap<&str, usize> = HashMap::new();
    for r in records {
        *by.entry(r.report.failure_label().unwrap_or("success"))
            .or_default() += 1;
    }
    let mut v: Vec<String> = by.into_iter().map(|(k, c)| format!("{k} {c}")).collect();
    v.sort();
    v.join(", ")
}

fn c5_hamilton_end_to_end() -> Verdict {
    let mut lines = Vec::new();
    let mut pass = false;
    for m in [1.0, 2.0] {
        let mut cfg = TrialConfig::new(E2E_N, ceil_ln(E2E_N));
        cfg.trials = E2E_TRIALS;
        cfg.multiplier = m;
        cfg.mode = SamplingMode::Missing;
        let (records, slowest) = timed_trials(&cfg);
        let verified = records
            .iter()
            .filter(|r| {
                let Some(Certificate::Cycle { order }) = &r.report.certificate else {
                    return false;
                };
                let g = Graph::from_edges(E2E_N, r.selected_log.iter().map(|s| s.edge)).unwrap();
                r.report.outcome.is_success()
                    && verify_hamilton(&g, &semirandom_ham::CycleCertificate::new(order.clone()))
                    && r.report.budget_check.edges_within_bound
                    && r.report.budget_check.rounds_within_t5
            })
            .count();
        // Cycle-search exhaustion and phase failures must be told apart.
        let distinguished = records.iter().all(|r| match &r.report.outcome {
            Outcome::CycleNotFound { .. } => r.report.failure_label() == Some("cycle_not_found"),
            Outcome::PhaseFailure { cause, .. } => r.report.failure_label() == Some(cause.label()),
            Outcome::Success => r.report.failure_label().is_none(),
        });
        let ok = verified >= E2E_REQUIRED && slowest < E2E_TIME_LIMIT && distinguished;
        pass |= ok;
        lines.push(format!(
            "m={m}: {verified}/{E2E_TRIALS} verified ({}), slowest {:.1} s",
            outcome_summary(&records),
            slowest.as_secs_f64()
        ));
    }
    let mut cfg = TrialConfig::new(E2E_N, ceil_ln(E2E_N));
    cfg.trials = E2E_TRIALS;
    calibrate(&mut cfg);
    let (records, slowest) = timed_trials(&cfg);
    lines.push(format!(
        "calibrated (not counted): {} ({}), slowest {:.1} s",
        records
            .iter()
            .filter(|r| r.report.outcome.is_success())
            .count(),
        outcome_summary(&records),
        slowest.as_secs_f64()
    ));
    Verdict {
        id: 5,
        name: "end-to-end Hamiltonicity",
        pass,
        detail: lines.join("; "),
    }
}

fn c6_cycle_oracle() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let budget = CycleBudget {
        max_steps: 100_000,
        max_time: None,
    };
    let (mut agree, mut certified, mut yes) = (0, 0, 0);
    for i in 0..CYCLE_INSTANCES {
        let n = rng.gen_range(3..=12);
        let g = gnp(n, rng.gen_range(0.2..0.7), rng.gen());
        let size = if i % 2 == 0 {
            0
        } else {
            rng.gen_range(1..=n / 2)
        };
        let mut vs: Vec<usize> = (0..n).collect();
        vs.shuffle(&mut rng);
        let m =
            ForcedMatching::new(n, vs.chunks_exact(2).take(size).map(|c| (c[0], c[1]))).unwrap();
        let exact = exact_hamilton(&g, &m).unwrap();
        let found = complete_cycle(&g, &m, budget, &mut cycle_stream(i as u64));
        if exact.is_some() == found.is_ok() {
            agree += 1;
        }
        if let Ok(f) = found {
            yes += 1;
            let mut h = g.clone();
            for &(u, v) in m.pairs() {
                if !h.has_edge(u, v) {
                    h.add_edge(u, v).unwrap();
                }
            }
            if verify_hamilton(&h, &f.certificate) && f.certificate.spans(&g, &m) {
                certified += 1;
            }
        }
    }
    Verdict {
        id: 6,
        name: "cycle engine oracle agreement",
        pass: agree == CYCLE_INSTANCES && certified == yes,
        detail: format!(
            "{agree}/{CYCLE_INSTANCES} decisions agree, {certified}/{yes} certificates verify"
        ),
    }
}

fn matching_verified(r: &TrialRecord, n: usize) -> bool {
    let Some(Certificate::Matching { pairs, unmatched }) = &r.report.certificate else {
        return false;
    };
    let g = Graph::from_edges(n, r.selected_log.iter().map(|s| s.edge)).unwrap();
    r.report.outcome.is_success()
        && pairs.len() == n / 2
        && semirandom_ham::matching::verify_matching(&g, pairs, *unmatched)
        && (r.selected_log.len() as f64) <= r.report.budgets.edge_bound()
        && r.report.totals.last_selection_round <= r.report.budgets.t5
        && (r.report.budgets.t5 as f64) < r.report.budgets.round_bound()
}

fn c7_matching() -> Verdict {
    let mut lines = Vec::new();
    let mut pass = true;
    for n in [E2E_N, E2E_N + 1] {
        let mut cfg = TrialConfig::new(n, ceil_ln(n));
        cfg.variant = Variant::Matching;
        cfg.trials = E2E_TRIALS;
        let set = run_trials(&cfg).unwrap();
        let ok = set
            .records
            .iter()
            .filter(|r| matching_verified(r, n))
            .count();
        pass &= ok >= E2E_REQUIRED;
        lines.push(format!(
            "n={n}: {ok}/{E2E_TRIALS} ({})",
            outcome_summary(&set.records)
        ));

        calibrate(&mut cfg);
        let set = run_trials(&cfg).unwrap();
        let ok = set
            .records
            .iter()
            .filter(|r| matching_verified(r, n))
            .count();
        lines.push(format!("n={n} calibrated (not counted): {ok}/{E2E_TRIALS}"));
    }
    Verdict {
        id: 7,
        name: "matching pipeline",
        pass,
        detail: lines.join("; "),
    }
}

fn c8_budgets() -> Verdict {
    let mut failures = Vec::new();
    let mut checked = 0;
    for e in 3..=7 {
        let n = 10usize.pow(e);
        for k in [1, ceil_ln(n)] {
            let b = compute_budgets(n, k, 1.0).unwrap();
            let nf = n as f64;
            let bound = (1.0 + 250.0 / nf.ln().ln()) * (1.0 + nf.ln() / (2.0 * k as f64)) * nf;
            checked += 1;
            if (b.t5 as f64) >= bound {
                failures.push(format!("n={n} K={k}: t5={} bound={bound:.1}", b.t5));
            }
        }
    }
    Verdict {
        id: 8,
        name: "budget regression",
        pass: failures.is_empty(),
        detail: if failures.is_empty() {
            format!("{checked} (n, K) pairs, 0 violations")
        } else {
            format!(
                "{checked} (n, K) pairs, {} violations: {}",
                failures.len(),
                failures.join("; ")
            )
        },
    }
}

fn c9_determinism() -> Verdict {
    let dir = tempfile::tempdir().unwrap();
    let mut notes = Vec::new();
    let mut pass = true;
    for (variant, calibrated) in [
        (Variant::Hamilton, false),
        (Variant::Hamilton, true),
        (Variant::Matching, true),
    ] {
        let mut cfg = TrialConfig::new(2000, 8);
        cfg.variant = variant;
        cfg.trials = 3;
        cfg.seed = 90;
        if calibrated {
            calibrate(&mut cfg);
        }
        let a = run_trials(&cfg).unwrap();
        let b = run_trials(&cfg).unwrap();
        let same = a.to_json().unwrap() == b.to_json().unwrap();
        let mut replays = 0;
        for rec in &a.records {
            let file = ReplayFile::from_record(variant, cfg.build_params(rec.index), rec);
            let path = dir
                .path()
                .join(format!("{variant}_{calibrated}_{}.json", rec.index));
            file.save(&path).unwrap();
            let loaded = ReplayFile::load(&path).unwrap();
            let ok = match loaded.verify() {
                Ok(Verified::Certificate) => rec.report.outcome.is_success(),
                Ok(Verified::LogOnly) => !rec.report.outcome.is_success(),
                Err(_) => false,
            } && loaded.rerun_matches().unwrap();
            if ok {
                replays += 1;
            }
        }
        let certs = a
            .records
            .iter()
            .filter(|r| r.report.certificate.is_some())
            .count();
        pass &= same && replays == a.records.len();
        notes.push(format!(
            "{variant}{}: identical={same}, replays {replays}/{} ({certs} with certificates)",
            if calibrated { " cal" } else { "" },
            a.records.len()
        ));
    }
    Verdict {
        id: 9,
        name: "determinism and replay",
        pass,
        detail: notes.join("; "),
    }
}

fn main() {
    let criteria: [fn() -> Verdict; 9] = [
        c1_core_oracle,
        c2_monotonicity,
        c3_uniformity,
        c4_path_cover_audit,
        c5_hamilton_end_to_end,
        c6_cycle_oracle,
        c7_matching,
        c8_budgets,
        c9_determinism,
    ];
    let mut failed = 0;
    for c in criteria {
        let v = c();
        if !v.pass {
            failed += 1;
        }
        println!(
            "{} criterion {}: {} ({})",
            if v.pass { "PASS" } else { "FAIL" },
            v.id,
            v.name,
            v.detail
        );
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
