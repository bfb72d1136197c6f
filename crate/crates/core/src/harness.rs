//! Multi-seed trial execution and aggregation.

use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::budgets::{Budgets, Schedule, DEFAULT_SEED_DENSITY};
use crate::cycle::CycleBudget;
use crate::ham::{build_hamiltonian, BuildError, BuildParams};
use crate::matching::build_matching;
use crate::process::{SamplingMode, Selection};
use crate::report::{Outcome, ReferenceLines, RunReport, Variant};
use crate::rng::trial_seed;

pub const MIN_N: usize = 16;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
}

impl std::str::FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "json" => Ok(OutputFormat::Json),
            "csv" => Ok(OutputFormat::Csv),
            other => Err(format!("unknown format {other:?} (expected json|csv)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialConfig {
    pub n: usize,
    pub k: usize,
    pub mode: SamplingMode,
    pub variant: Variant,
    /// Trial `i` runs with seed `seed + i`.
    pub seed: u64,
    pub trials: usize,
    pub multiplier: f64,
    pub seed_density: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed_fraction: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub end_cap: Option<f64>,
    pub cycle_budget: CycleBudget,
    pub format: OutputFormat,
}

impl TrialConfig {
    pub fn new(n: usize, k: usize) -> Self {
        TrialConfig {
            n,
            k,
            mode: SamplingMode::Missing,
            variant: Variant::Hamilton,
            seed: 0,
            trials: 1,
            multiplier: 1.0,
            seed_density: DEFAULT_SEED_DENSITY,
            seed_fraction: None,
            end_cap: None,
            cycle_budget: CycleBudget::default(),
            format: OutputFormat::Json,
        }
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.n < MIN_N {
            return Err(HarnessError::Config(format!(
                "n must be at least {MIN_N}, got {}",
                self.n
            )));
        }
        if self.k == 0 {
            return Err(HarnessError::Config("K must be at least 1".into()));
        }
        if self.trials == 0 {
            return Err(HarnessError::Config("trials must be at least 1".into()));
        }
        self.budgets()?;
        Ok(())
    }

    pub fn budgets(&self) -> Result<Budgets, HarnessError> {
        let schedule = match self.variant {
            Variant::Hamilton => Schedule::Hamilton,
            Variant::Matching => Schedule::Matching,
        };
        self.build_params(0)
            .budgets(schedule)
            .map_err(|e| HarnessError::Config(e.to_string()))
    }

    pub fn build_params(&self, trial: usize) -> BuildParams {
        BuildParams {
            n: self.n,
            k: self.k,
            mode: self.mode,
            seed: trial_seed(self.seed, trial),
            multiplier: self.multiplier,
            seed_density: self.seed_density,
            seed_fraction: self.seed_fraction,
            end_cap: self.end_cap,
            cycle_budget: self.cycle_budget,
        }
    }
}

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("trial {trial}: {source}")]
    Trial {
        trial: usize,
        #[source]
        source: BuildError,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("thread pool: {0}")]
    Pool(String),
}

/// How trials are scheduled. Results do not depend on the choice.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Executor {
    Sequential,
    /// Rayon's global pool, or a dedicated pool of `jobs` threads.
    #[cfg(feature = "parallel")]
    Parallel {
        jobs: Option<usize>,
    },
}

impl Default for Executor {
    fn default() -> Self {
        #[cfg(feature = "parallel")]
        return Executor::Parallel { jobs: None };
        #[cfg(not(feature = "parallel"))]
        Executor::Sequential
    }
}

/// One trial's report and the selection log it was produced from.
#[derive(Clone, Debug)]
pub struct TrialRecord {
    pub index: usize,
    pub report: RunReport,
    pub selected_log: Vec<Selection>,
}

/// Runs a single trial of either variant.
pub fn run_trial(cfg: &TrialConfig, index: usize) -> Result<TrialRecord, HarnessError> {
    let params = cfg.build_params(index);
    let run = match cfg.variant {
        Variant::Hamilton => build_hamiltonian(&params).map(|r| (r.report, r.selected_log)),
        Variant::Matching => build_matching(&params).map(|r| (r.report, r.selected_log)),
    };
    let (report, selected_log) = run.map_err(|source| HarnessError::Trial {
        trial: index,
        source,
    })?;
    Ok(TrialRecord {
        index,
        report,
        selected_log,
    })
}

pub fn run_trials(cfg: &TrialConfig) -> Result<TrialSet, HarnessError> {
    run_trials_with(cfg, Executor::default())
}

pub fn run_trials_with(cfg: &TrialConfig, exec: Executor) -> Result<TrialSet, HarnessError> {
    cfg.validate()?;
    let mut records = match exec {
        #[cfg(feature = "parallel")]
        Executor::Parallel { jobs: Some(jobs) } => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(jobs)
                .build()
                .map_err(|e| HarnessError::Pool(e.to_string()))?;
            pool.install(|| run_parallel(cfg))?
        }
        #[cfg(feature = "parallel")]
        Executor::Parallel { jobs: None } => run_parallel(cfg)?,
        Executor::Sequential => run_sequential(cfg)?,
    };
    records.sort_by_key(|r| r.index);
    Ok(TrialSet {
        config: cfg.clone(),
        records,
    })
}

fn run_sequential(cfg: &TrialConfig) -> Result<Vec<TrialRecord>, HarnessError> {
    (0..cfg.trials).map(|i| run_trial(cfg, i)).collect()
}

#[cfg(feature = "parallel")]
fn run_parallel(cfg: &TrialConfig) -> Result<Vec<TrialRecord>, HarnessError> {
    use rayon::prelude::*;
    (0..cfg.trials)
        .into_par_iter()
        .map(|i| run_trial(cfg, i))
        .collect()
}

/// All trials of one configuration, in index order.
#[derive(Clone, Debug)]
pub struct TrialSet {
    pub config: TrialConfig,
    pub records: Vec<TrialRecord>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SuccessStats {
    pub mean_rounds: f64,
    pub max_rounds: u64,
    pub mean_edges: f64,
    pub max_edges: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AggregateReport {
    pub config: TrialConfig,
    pub trials: usize,
    pub successes: usize,
    pub phase_failures: usize,
    pub cycle_not_found: usize,
    pub success_rate: f64,
    /// Failure label → count, over phase failures only.
    pub failures_by_cause: BTreeMap<String, usize>,
    /// Phase index → count of trials that failed there.
    pub failures_by_phase: BTreeMap<usize, usize>,
    /// Statistics of `last_selection_round` and selected edges over successes.
    pub on_success: Option<SuccessStats>,
    pub reference: ReferenceLines,
    pub budgets: Budgets,
}

#[derive(Serialize)]
struct JsonOutput<'a> {
    aggregate: &'a AggregateReport,
    trials: Vec<&'a RunReport>,
}

#[derive(Serialize)]
struct CsvRow<'a> {
    trial: usize,
    seed: u64,
    variant: Variant,
    n: usize,
    k: usize,
    mode: SamplingMode,
    multiplier: f64,
    status: &'a str,
    failure_phase: Option<usize>,
    failure_cause: Option<&'a str>,
    rounds: u64,
    last_selection_round: u64,
    edges_selected: usize,
    seed_edges: usize,
    black: usize,
    blue: usize,
    uncovered: usize,
    end_after_phase3: Option<usize>,
    edges_within_bound: bool,
    rounds_within_t5: bool,
    lower_bound_rounds: f64,
    round_bound: f64,
}

impl TrialSet {
    pub fn aggregate(&self) -> AggregateReport {
        let trials = self.records.len();
        let mut successes = 0;
        let mut phase_failures = 0;
        let mut cycle_not_found = 0;
        let mut failures_by_cause = BTreeMap::new();
        let mut failures_by_phase = BTreeMap::new();
        let mut ok_rounds = Vec::new();
        let mut ok_edges = Vec::new();
        for r in &self.records {
            match &r.report.outcome {
                Outcome::Success => {
                    successes += 1;
                    ok_rounds.push(r.report.totals.last_selection_round);
                    ok_edges.push(r.report.totals.edges_selected);
                }
                Outcome::PhaseFailure { phase, cause } => {
                    phase_failures += 1;
                    *failures_by_cause
                        .entry(cause.label().to_string())
                        .or_insert(0) += 1;
                    *failures_by_phase.entry(*phase).or_insert(0) += 1;
                }
                Outcome::CycleNotFound { .. } => cycle_not_found += 1,
            }
        }
        let on_success = (!ok_rounds.is_empty()).then(|| SuccessStats {
            mean_rounds: ok_rounds.iter().sum::<u64>() as f64 / ok_rounds.len() as f64,
            max_rounds: *ok_rounds.iter().max().expect("nonempty"),
            mean_edges: ok_edges.iter().sum::<usize>() as f64 / ok_edges.len() as f64,
            max_edges: *ok_edges.iter().max().expect("nonempty"),
        });
        let budgets = self.config.budgets().expect("validated config");
        AggregateReport {
            config: self.config.clone(),
            trials,
            successes,
            phase_failures,
            cycle_not_found,
            success_rate: successes as f64 / trials as f64,
            failures_by_cause,
            failures_by_phase,
            on_success,
            reference: ReferenceLines::from_budgets(&budgets),
            budgets,
        }
    }

    /// Aggregate plus every trial report, pretty-printed.
    pub fn to_json(&self) -> Result<String, HarnessError> {
        let agg = self.aggregate();
        let out = JsonOutput {
            aggregate: &agg,
            trials: self.records.iter().map(|r| &r.report).collect(),
        };
        Ok(serde_json::to_string_pretty(&out)?)
    }

    /// One row per trial.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<(), HarnessError> {
        let mut wtr = csv::Writer::from_writer(w);
        for rec in &self.records {
            let r = &rec.report;
            let (status, phase, cause) = match &r.outcome {
                Outcome::Success => ("success", None, None),
                Outcome::PhaseFailure { phase, cause } => {
                    ("phase_failure", Some(*phase), Some(cause.label()))
                }
                Outcome::CycleNotFound { .. } => ("cycle_not_found", None, None),
            };
            wtr.serialize(CsvRow {
                trial: rec.index,
                seed: r.params.seed,
                variant: r.params.variant,
                n: r.params.n,
                k: r.params.k,
                mode: r.params.mode,
                multiplier: r.params.multiplier,
                status,
                failure_phase: phase,
                failure_cause: cause,
                rounds: r.totals.rounds,
                last_selection_round: r.totals.last_selection_round,
                edges_selected: r.totals.edges_selected,
                seed_edges: r.diagnostics.seed_edges,
                black: r.diagnostics.black,
                blue: r.diagnostics.blue,
                uncovered: r.diagnostics.uncovered,
                end_after_phase3: r.diagnostics.end_after_phase3,
                edges_within_bound: r.budget_check.edges_within_bound,
                rounds_within_t5: r.budget_check.rounds_within_t5,
                lower_bound_rounds: r.reference.lower_bound_rounds,
                round_bound: r.reference.round_bound,
            })?;
        }
        wtr.flush()?;
        Ok(())
    }

    pub fn to_csv(&self) -> Result<String, HarnessError> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        Ok(String::from_utf8(buf).expect("csv output is utf-8"))
    }

    pub fn render(&self) -> Result<String, HarnessError> {
        match self.config.format {
            OutputFormat::Json => self.to_json(),
            OutputFormat::Csv => self.to_csv(),
        }
    }
}
