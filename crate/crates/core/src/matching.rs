//! The perfect-matching builder.
//!
//! Phase 1 is shared with the Hamilton builder. Phase 2 matches `U`
//! greedily, Phase 3 matches leftovers into `W`, Phases 4 and 5 fix the
//! remaining `End` vertices with augmenting paths `v u u' y` of length 3, and
//! the unmatched part of the seed core is matched along a Hamilton cycle.

use std::collections::{BTreeMap, HashMap, HashSet};

use rand::Rng;

use crate::budgets::{Budgets, Schedule};
use crate::cycle::{complete_cycle, CycleBudget, CycleError, ForcedMatching};
use crate::graph::{edge, Edge, Graph};
use crate::ham::{
    check_seed, phase1_select, BluePool, BuildError, BuildParams, FailureCause, PhaseError,
    TrialRun, Zone, Zones,
};
use crate::process::ProcessState;
use crate::report::{
    phase_reports, BudgetCheck, Certificate, Diagnostics, Outcome, ReferenceLines, RunReport,
    Totals, Variant,
};
use crate::rng;

/// The current matching `M` with the `End` and `W` bookkeeping.
#[derive(Clone, Debug)]
pub struct MatchingState {
    mate: Vec<Option<usize>>,
    /// Vertices of `U` left unmatched by Phase 3.
    pub end: Vec<usize>,
    /// `End` vertex → matched `U` vertices it linked to in Phase 4.
    pub end_v: BTreeMap<usize, Vec<usize>>,
    /// Partner `u'` of a claimed `u` → (`End` vertex, `u`), unresolved only.
    by_partner: HashMap<usize, (usize, usize)>,
    /// `End` vertex → the `by_partner` keys it registered.
    partner_keys: HashMap<usize, Vec<usize>>,
    claimed: HashSet<Edge>,
    pub w_avail: BluePool,
    /// `W'`: blue vertices matched so far.
    pub w_used: Vec<usize>,
    pub augmentations: usize,
}

impl MatchingState {
    pub fn new(zones: &Zones) -> Self {
        MatchingState {
            mate: vec![None; zones.n()],
            end: Vec::new(),
            end_v: BTreeMap::new(),
            by_partner: HashMap::new(),
            partner_keys: HashMap::new(),
            claimed: HashSet::new(),
            w_avail: BluePool::new(zones),
            w_used: Vec::new(),
            augmentations: 0,
        }
    }

    pub fn mate(&self, v: usize) -> Option<usize> {
        self.mate[v]
    }

    pub fn pairs(&self) -> Vec<Edge> {
        (0..self.mate.len())
            .filter_map(|v| self.mate[v].filter(|&u| v < u).map(|u| (v, u)))
            .collect()
    }

    fn pair(&mut self, u: usize, v: usize) {
        debug_assert!(u != v);
        self.mate[u] = Some(v);
        self.mate[v] = Some(u);
    }

    fn is_end(&self, v: usize) -> bool {
        self.end_v.contains_key(&v)
    }

    /// True iff the mate table is symmetric.
    pub fn is_valid(&self) -> bool {
        (0..self.mate.len()).all(|v| match self.mate[v] {
            Some(u) => u != v && self.mate[u] == Some(v),
            None => true,
        })
    }
}

/// Phase 2: greedily match pairs of unmatched `U` vertices.
pub fn m_phase2(
    state: &mut ProcessState,
    b: &Budgets,
    zones: &Zones,
    ms: &mut MatchingState,
) -> Result<(), PhaseError> {
    state.run_until(b.t2, |_, r| {
        let pick = r.pairs.iter().copied().find(|&(u, v)| {
            zones.is_uncovered(u)
                && zones.is_uncovered(v)
                && ms.mate[u].is_none()
                && ms.mate[v].is_none()
        });
        if let Some((u, v)) = pick {
            ms.pair(u, v);
        }
        pick
    })?;
    Ok(())
}

/// Phase 3: match unmatched `U` vertices into `W`; the rest form `End`.
pub fn m_phase3(
    state: &mut ProcessState,
    b: &Budgets,
    zones: &Zones,
    ms: &mut MatchingState,
) -> Result<(), PhaseError> {
    state.run_until(b.t3, |_, r| {
        let free_u = |v: usize| zones.is_uncovered(v) && ms.mate[v].is_none();
        let pick = r.pairs.iter().find_map(|&(a, c)| {
            if free_u(a) && ms.w_avail.contains(c) {
                Some((a, c))
            } else if free_u(c) && ms.w_avail.contains(a) {
                Some((c, a))
            } else {
                None
            }
        });
        pick.map(|(u, w)| {
            ms.pair(u, w);
            ms.w_avail.take(w);
            ms.w_used.push(w);
            edge(u, w)
        })
    })?;
    ms.end = (0..zones.n())
        .filter(|&v| zones.is_uncovered(v) && ms.mate[v].is_none())
        .collect();
    ms.end_v = ms.end.iter().map(|&v| (v, Vec::new())).collect();
    if ms.end.len() as f64 > b.end_cap {
        return Err(FailureCause::MPhase3EndTooLarge {
            end: ms.end.len(),
            cap: b.end_cap,
        }
        .into());
    }
    Ok(())
}

/// Phase 4: every `End` vertex links to matched `U` vertices on distinct
/// unclaimed matching edges.
pub fn m_phase4(
    state: &mut ProcessState,
    b: &Budgets,
    zones: &Zones,
    ms: &mut MatchingState,
) -> Result<(), PhaseError> {
    let cap = b.fanout_required;
    state.run_until(b.t4, |_, r| {
        for &(a, c) in &r.pairs {
            for (v, u) in [(a, c), (c, a)] {
                if !ms.is_end(v) || ms.end_v[&v].len() >= cap || !zones.is_uncovered(u) {
                    continue;
                }
                let Some(partner) = ms.mate[u] else {
                    continue;
                };
                if !ms.claimed.insert(edge(u, partner)) {
                    continue;
                }
                ms.end_v.get_mut(&v).expect("End vertex").push(u);
                ms.by_partner.insert(partner, (v, u));
                ms.partner_keys.entry(v).or_default().push(partner);
                return Some(edge(v, u));
            }
        }
        None
    })?;
    let deficient: Vec<(usize, usize)> = ms
        .end_v
        .iter()
        .filter(|(_, us)| us.len() < cap)
        .map(|(&v, us)| (v, us.len()))
        .collect();
    if let Some(&(vertex, claims)) = deficient.iter().min_by_key(|&&(v, c)| (c, v)) {
        return Err(FailureCause::MPhase4Fanout {
            vertex,
            claims,
            required: cap,
            deficient: deficient.len(),
        }
        .into());
    }
    Ok(())
}

/// Phase 5: for a claimed `u` of `End` vertex `v`, select `u' y` with `u'`
/// the mate of `u` and `y ∈ W`, then augment along `v u u' y`.
pub fn m_phase5(
    state: &mut ProcessState,
    b: &Budgets,
    ms: &mut MatchingState,
) -> Result<(), PhaseError> {
    state.run_until(b.t5, |_, r| {
        let pick = r.pairs.iter().find_map(|&(a, c)| {
            if ms.by_partner.contains_key(&a) && ms.w_avail.contains(c) {
                Some((a, c))
            } else if ms.by_partner.contains_key(&c) && ms.w_avail.contains(a) {
                Some((c, a))
            } else {
                None
            }
        });
        pick.map(|(x, y)| {
            let (v, u) = ms.by_partner[&x];
            debug_assert_eq!(ms.mate[u], Some(x));
            ms.pair(v, u);
            ms.pair(x, y);
            ms.w_avail.take(y);
            ms.w_used.push(y);
            ms.augmentations += 1;
            for p in ms.partner_keys.remove(&v).unwrap_or_default() {
                ms.by_partner.remove(&p);
            }
            debug_assert!(ms.is_valid());
            edge(x, y)
        })
    })?;
    let unresolved = ms.end.iter().filter(|&&v| ms.mate[v].is_none()).count();
    if unresolved > 0 {
        return Err(FailureCause::MPhase5Unresolved { unresolved }.into());
    }
    Ok(())
}

/// Matching pairs, the unmatched vertex, and the cycle search's (vertices, steps).
pub type Finalized = (Vec<Edge>, Option<usize>, Option<(usize, u64)>);

/// Matches the still-unmatched seed-core vertices `Z \ W'` along a Hamilton
/// cycle of the builder restricted to them. Returns `M ∪ M'` and the
/// unmatched vertex, if any.
pub fn finalize_matching<R: Rng>(
    ms: &MatchingState,
    builder: &Graph,
    budget: CycleBudget,
    rng: &mut R,
) -> Result<Finalized, CycleError> {
    let rest: Vec<usize> = (0..builder.n()).filter(|&v| ms.mate[v].is_none()).collect();
    let mut pairs = ms.pairs();
    let mut unmatched = None;
    let mut search = None;
    match rest.len() {
        0 => {}
        1 => unmatched = Some(rest[0]),
        2 => {
            if !builder.has_edge(rest[0], rest[1]) {
                return Err(CycleError::NotFound { steps: 0 });
            }
            pairs.push(edge(rest[0], rest[1]));
        }
        _ => {
            let (g, labels) = builder.induced(&rest);
            let found = complete_cycle(&g, &ForcedMatching::empty(g.n()), budget, rng)?;
            let order: Vec<usize> = found.certificate.order.iter().map(|&i| labels[i]).collect();
            pairs.extend(order.chunks_exact(2).map(|c| edge(c[0], c[1])));
            if order.len() % 2 == 1 {
                unmatched = order.last().copied();
            }
            search = Some((g.n(), found.steps));
        }
    }
    pairs.sort_unstable();
    Ok((pairs, unmatched, search))
}

/// Checks that `pairs` is a matching of `g` leaving exactly `n mod 2` vertices
/// uncovered, with `unmatched` being that vertex.
pub fn verify_matching(g: &Graph, pairs: &[Edge], unmatched: Option<usize>) -> bool {
    let n = g.n();
    let mut covered = vec![false; n];
    for &(u, v) in pairs {
        if u >= n || v >= n || covered[u] || covered[v] || !g.has_edge(u, v) {
            return false;
        }
        covered[u] = true;
        covered[v] = true;
    }
    let missing: Vec<usize> = (0..n).filter(|&v| !covered[v]).collect();
    pairs.len() == n / 2 && missing.first().copied() == unmatched
}

/// Intermediate structures of a matching trial that passed Phase 1.
#[derive(Clone, Debug)]
pub struct MatchingArtifacts {
    pub zones: Zones,
    pub state: MatchingState,
}

fn run_phases(
    state: &mut ProcessState,
    b: &Budgets,
    diag: &mut Diagnostics,
    art: &mut Option<MatchingArtifacts>,
) -> Result<(), PhaseError> {
    let seed = phase1_select(state, b)?;
    diag.seed_edges = seed.graph.edge_count();
    diag.black = seed.partition.black.len();
    diag.blue = seed.partition.blue.len();
    diag.blue_fraction = diag.blue as f64 / b.n_prime as f64;
    check_seed(&seed, b)?;
    let zones = seed.zones(b.n);
    diag.uncovered = zones.count(Zone::Uncovered);
    let ms = MatchingState::new(&zones);
    let a = art.insert(MatchingArtifacts { zones, state: ms });
    let (zones, ms) = (&a.zones, &mut a.state);

    m_phase2(state, b, zones, ms)?;
    diag.end_after_phase2 = Some(
        (0..b.n)
            .filter(|&v| zones.is_uncovered(v) && ms.mate[v].is_none())
            .count(),
    );
    m_phase3(state, b, zones, ms)?;
    diag.end_after_phase3 = Some(ms.end.len());
    m_phase4(state, b, zones, ms)?;
    diag.phase4_links = Some(ms.end_v.values().map(Vec::len).sum());
    m_phase5(state, b, ms)?;
    diag.rerouted = Some(ms.augmentations);
    Ok(())
}

/// Runs one matching trial end to end.
pub fn build_matching(params: &BuildParams) -> Result<TrialRun<MatchingArtifacts>, BuildError> {
    let b = params.budgets(Schedule::Matching)?;
    let state = ProcessState::new(params.n, params.k, params.mode, params.seed)?;
    run_matching(state, b, params)
}

/// As [`build_matching`], on a caller-supplied process and budget table. The
/// process must be fresh and match `params.n`; `params` still fixes the
/// cycle search and the report's parameter block.
pub fn run_matching(
    mut state: ProcessState,
    b: Budgets,
    params: &BuildParams,
) -> Result<TrialRun<MatchingArtifacts>, BuildError> {
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
    let mut artifacts = None;

    let (outcome, certificate) = match run_phases(&mut state, &b, &mut diag, &mut artifacts) {
        Err(PhaseError::Process(e)) => return Err(e.into()),
        Err(PhaseError::Failure(cause)) => (
            Outcome::PhaseFailure {
                phase: cause.phase(),
                cause,
            },
            None,
        ),
        Ok(()) => {
            let ms = &artifacts.as_ref().expect("phases ran").state;
            let mut rng = rng::cycle_stream(params.seed);
            match finalize_matching(ms, state.builder(), params.cycle_budget, &mut rng) {
                Ok((pairs, unmatched, search)) => {
                    if let Some((vertices, steps)) = search {
                        diag.cycle_vertices = Some(vertices);
                        diag.cycle_steps = Some(steps);
                    }
                    if !verify_matching(state.builder(), &pairs, unmatched) {
                        return Err(BuildError::Certificate(
                            "matching does not cover all but n mod 2 vertices".into(),
                        ));
                    }
                    (
                        Outcome::Success,
                        Some(Certificate::Matching { pairs, unmatched }),
                    )
                }
                Err(CycleError::NotFound { steps }) => {
                    diag.cycle_steps = Some(steps);
                    (Outcome::CycleNotFound { steps }, None)
                }
                Err(e) => return Err(BuildError::Certificate(e.to_string())),
            }
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
        params: params.run_params(Variant::Matching),
        per_phase: phase_reports(&b, &log, rounds, failure),
        totals: Totals {
            rounds,
            edges_selected,
            last_selection_round,
        },
        diagnostics: diag,
        certificate,
        budget_check: BudgetCheck {
            edges_within_bound: (edges_selected as f64) <= b.edge_bound(),
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
