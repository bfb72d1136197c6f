//! The Hamilton-cycle builder: five selection phases, path assembly and the
//! final cycle through the seed core.

pub mod paths;
pub mod phases;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use paths::{
    assemble_paths, AssemblyError, BluePool, Claim, EndCopy, PathSystem, RewireState, Zone, Zones,
};
pub use phases::{
    check_seed, phase1, phase1_select, phase2, phase3, phase4, phase5, FailureCause, PhaseError,
    SeedGraph,
};

use crate::budgets::{BudgetError, Budgets, Schedule, DEFAULT_SEED_DENSITY};
use crate::cycle::{
    complete_cycle, substitute_paths, verify_hamilton, CycleBudget, CycleError, ForcedMatching,
};
use crate::graph::{edge, Edge, Graph};
use crate::process::{ProcessError, ProcessState, SamplingMode, Selection};
use crate::report::{
    phase_reports, BudgetCheck, Certificate, Diagnostics, Outcome, ReferenceLines, RunParams,
    RunReport, Totals, Variant,
};
use crate::rng;

/// Inputs of a single trial.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BuildParams {
    pub n: usize,
    pub k: usize,
    pub mode: SamplingMode,
    pub seed: u64,
    pub multiplier: f64,
    pub seed_density: usize,
    /// Seed-graph size as a fraction of `n`; `None` keeps `n / ln ln n`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed_fraction: Option<f64>,
    /// Phase-3 failure threshold; `None` keeps `n / ln^5 n`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub end_cap: Option<f64>,
    pub cycle_budget: CycleBudget,
}

impl BuildParams {
    pub fn new(n: usize, k: usize, seed: u64) -> Self {
        BuildParams {
            n,
            k,
            mode: SamplingMode::Missing,
            seed,
            multiplier: 1.0,
            seed_density: DEFAULT_SEED_DENSITY,
            seed_fraction: None,
            end_cap: None,
            cycle_budget: CycleBudget::default(),
        }
    }

    /// The budget table for `schedule` with this trial's overrides applied.
    pub fn budgets(&self, schedule: Schedule) -> Result<Budgets, BudgetError> {
        let mut b = Budgets::for_schedule(schedule, self.n, self.k, self.multiplier)?
            .with_seed_density(self.seed_density)?;
        if let Some(f) = self.seed_fraction {
            b = b.with_seed_fraction(f)?;
        }
        if let Some(c) = self.end_cap {
            b = b.with_end_cap(c)?;
        }
        Ok(b)
    }

    pub(crate) fn run_params(&self, variant: Variant) -> RunParams {
        RunParams {
            variant,
            n: self.n,
            k: self.k,
            mode: self.mode,
            seed: self.seed,
            multiplier: self.multiplier,
            seed_density: self.seed_density,
            seed_fraction: self.seed_fraction,
            end_cap: self.end_cap,
            cycle_max_steps: self.cycle_budget.max_steps,
        }
    }
}

/// Errors that are not trial outcomes: bad parameters or broken invariants.
#[derive(Debug, Error)]
pub enum BuildError {
    #[error(transparent)]
    Budget(#[from] BudgetError),
    #[error(transparent)]
    Process(#[from] ProcessError),
    #[error("path assembly failed: {0}")]
    Assembly(#[from] AssemblyError),
    #[error("certificate check failed: {0}")]
    Certificate(String),
    #[error("inconsistent inputs: {0}")]
    Mismatch(String),
}

/// Intermediate structures of a trial that reached path assembly.
#[derive(Clone, Debug)]
pub struct HamArtifacts {
    pub zones: Zones,
    pub paths: PathSystem,
    pub rewire: RewireState,
    /// The assembled path cover of `U`.
    pub cover: Vec<Vec<usize>>,
}

/// A finished trial: the report, the selection log it came from, and the
/// internals when the trial got far enough to have them.
#[derive(Clone, Debug)]
pub struct TrialRun<A> {
    pub report: RunReport,
    pub selected_log: Vec<Selection>,
    pub builder: Graph,
    pub artifacts: Option<A>,
}

struct Stages {
    zones: Zones,
    ps: PathSystem,
    rw: RewireState,
}

fn run_phases(
    state: &mut ProcessState,
    b: &Budgets,
    diag: &mut Diagnostics,
) -> Result<Stages, PhaseError> {
    let seed = phase1_select(state, b)?;
    diag.seed_edges = seed.graph.edge_count();
    diag.black = seed.partition.black.len();
    diag.blue = seed.partition.blue.len();
    diag.blue_fraction = diag.blue as f64 / b.n_prime as f64;
    check_seed(&seed, b)?;
    let zones = seed.zones(b.n);
    diag.uncovered = zones.count(Zone::Uncovered);

    let mut ps = phase2(state, b, &zones)?;
    diag.paths_after_phase2 = Some(ps.paths.len());
    diag.end_after_phase2 = Some(ps.end_size());

    let mut pool = BluePool::new(&zones);
    phase3(state, b, &zones, &mut ps, &mut pool)?;
    diag.end_after_phase3 = Some(ps.end_size());

    let mut rw = RewireState::new(&ps);
    phase4(state, b, &ps, &mut rw)?;
    diag.phase4_links = Some(rw.e4.len());

    phase5(state, b, &mut rw, &mut pool)?;
    diag.rerouted = Some(rw.copies.len());
    Ok(Stages { zones, ps, rw })
}

/// Runs one Hamilton trial end to end.
pub fn build_hamiltonian(params: &BuildParams) -> Result<TrialRun<HamArtifacts>, BuildError> {
    let b = params.budgets(Schedule::Hamilton)?;
    let state = ProcessState::new(params.n, params.k, params.mode, params.seed)?;
    run_hamiltonian(state, b, params)
}

/// As [`build_hamiltonian`], on a caller-supplied process and budget table. The
/// process must be fresh and match `params.n`; `params` still fixes the
/// cycle search and the report's parameter block.
pub fn run_hamiltonian(
    mut state: ProcessState,
    b: Budgets,
    params: &BuildParams,
) -> Result<TrialRun<HamArtifacts>, BuildError> {
    if state.n() != params.n || b.n != params.n || state.round() != 0 {
        return Err(BuildError::Mismatch(format!(
            "process n = {} at round {}, budgets n = {}, params n = {}",
            state.n(),
            state.round(),
            b.n,
            params.n
        )));
    }
    let mut diag = Diagnostics::default();

    let (outcome, certificate, artifacts) = match run_phases(&mut state, &b, &mut diag) {
        Err(PhaseError::Process(e)) => return Err(e.into()),
        Err(PhaseError::Failure(cause)) => (
            Outcome::PhaseFailure {
                phase: cause.phase(),
                cause,
            },
            None,
            None,
        ),
        Ok(st) => {
            let cover = assemble_paths(&st.ps, &st.rw, &st.zones)?;
            diag.assembled_paths = Some(cover.len());
            let (outcome, cert) =
                close_cycle(state.builder(), &st.zones, &cover, params, &mut diag)?;
            let art = HamArtifacts {
                zones: st.zones,
                paths: st.ps,
                rewire: st.rw,
                cover,
            };
            (outcome, cert, Some(art))
        }
    };

    let rounds = state.round();
    let (builder, log) = state.into_parts();
    let failure = match &outcome {
        Outcome::PhaseFailure { cause, .. } => Some(cause),
        _ => None,
    };
    let edges_selected = log.len();
    let last_selection_round = log.last().map_or(0, |s| s.round);
    let report = RunReport {
        params: params.run_params(Variant::Hamilton),
        per_phase: phase_reports(&b, &log, rounds, failure),
        totals: Totals {
            rounds,
            edges_selected,
            last_selection_round,
        },
        diagnostics: diag,
        certificate,
        budget_check: BudgetCheck {
            edges_within_bound: edges_selected <= b.selection_bound(),
            rounds_within_t5: last_selection_round <= b.t5,
            t5_below_round_bound: (b.t5 as f64) < b.round_bound(),
        },
        reference: ReferenceLines::from_budgets(&b),
        outcome,
        budgets: b,
    };
    Ok(TrialRun {
        report,
        selected_log: log,
        builder,
        artifacts,
    })
}

/// Finds a cycle through the seed core that uses every path of `cover` as a
/// forced pair, then splices the paths back in.
fn close_cycle(
    builder: &Graph,
    zones: &Zones,
    cover: &[Vec<usize>],
    params: &BuildParams,
    diag: &mut Diagnostics,
) -> Result<(Outcome, Option<Certificate>), BuildError> {
    let n = builder.n();
    let mut core: Vec<usize> = (0..n).filter(|&v| !zones.is_uncovered(v)).collect();
    core.sort_unstable();
    let (gstar, labels) = builder.induced(&core);
    let mut local = vec![usize::MAX; n];
    for (i, &v) in labels.iter().enumerate() {
        local[v] = i;
    }
    let ends: Vec<Edge> = cover.iter().map(|p| edge(p[0], p[p.len() - 1])).collect();
    let forced_local =
        ForcedMatching::new(gstar.n(), ends.iter().map(|&(a, c)| (local[a], local[c])))
            .map_err(|e| BuildError::Certificate(e.to_string()))?;
    diag.cycle_vertices = Some(gstar.n());

    let mut rng = rng::cycle_stream(params.seed);
    let found = match complete_cycle(&gstar, &forced_local, params.cycle_budget, &mut rng) {
        Ok(f) => f,
        Err(CycleError::NotFound { steps }) => {
            diag.cycle_steps = Some(steps);
            return Ok((Outcome::CycleNotFound { steps }, None));
        }
        Err(e) => return Err(BuildError::Certificate(e.to_string())),
    };
    diag.cycle_method = Some(found.method);
    diag.cycle_steps = Some(found.steps);

    let h = crate::cycle::CycleCertificate::new(
        found.certificate.order.iter().map(|&i| labels[i]).collect(),
    );
    let forced =
        ForcedMatching::new(n, ends).map_err(|e| BuildError::Certificate(e.to_string()))?;
    let full =
        substitute_paths(&h, &forced, cover).map_err(|e| BuildError::Certificate(e.to_string()))?;
    if !verify_hamilton(builder, &full) {
        return Err(BuildError::Certificate(
            "assembled cycle is not Hamiltonian in the builder graph".into(),
        ));
    }
    Ok((
        Outcome::Success,
        Some(Certificate::Cycle { order: full.order }),
    ))
}
