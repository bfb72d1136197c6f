//! The five online selection phases.
//!
//! Every phase owns a fixed window of rounds and, in each round, takes the
//! first presented pair that satisfies its rule. A phase that ends in a bad
//! state reports a [`FailureCause`] and the trial stops there.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::paths::{BluePool, Claim, EndCopy, PathSystem, RewireState, Zone, Zones};
use crate::budgets::Budgets;
use crate::graph::{edge, Graph};
use crate::process::{ProcessError, ProcessState};
use crate::strong_core::{strong_core, CorePartition};

/// Why a phase gave up.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FailureCause {
    Phase1Edges {
        selected: usize,
        required: usize,
    },
    Phase1Blue {
        blue: usize,
        threshold: f64,
    },
    Phase2TooManyPaths {
        paths: usize,
        cap: f64,
    },
    Phase3EndTooLarge {
        end: usize,
        cap: f64,
    },
    Phase4Fanout {
        vertex: usize,
        claims: usize,
        required: usize,
        deficient_copies: usize,
    },
    Phase5Unresolved {
        unresolved: usize,
    },
    MPhase3EndTooLarge {
        end: usize,
        cap: f64,
    },
    MPhase4Fanout {
        vertex: usize,
        claims: usize,
        required: usize,
        deficient: usize,
    },
    MPhase5Unresolved {
        unresolved: usize,
    },
}

impl FailureCause {
    pub fn phase(&self) -> usize {
        match self {
            FailureCause::Phase1Edges { .. } | FailureCause::Phase1Blue { .. } => 1,
            FailureCause::Phase2TooManyPaths { .. } => 2,
            FailureCause::Phase3EndTooLarge { .. } | FailureCause::MPhase3EndTooLarge { .. } => 3,
            FailureCause::Phase4Fanout { .. } | FailureCause::MPhase4Fanout { .. } => 4,
            FailureCause::Phase5Unresolved { .. } | FailureCause::MPhase5Unresolved { .. } => 5,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            FailureCause::Phase1Edges { .. } => "phase1_edges",
            FailureCause::Phase1Blue { .. } => "phase1_blue",
            FailureCause::Phase2TooManyPaths { .. } => "phase2_too_many_paths",
            FailureCause::Phase3EndTooLarge { .. } => "phase3_end_too_large",
            FailureCause::Phase4Fanout { .. } => "phase4_fanout",
            FailureCause::Phase5Unresolved { .. } => "phase5_unresolved",
            FailureCause::MPhase3EndTooLarge { .. } => "m_phase3_end_too_large",
            FailureCause::MPhase4Fanout { .. } => "m_phase4_fanout",
            FailureCause::MPhase5Unresolved { .. } => "m_phase5_unresolved",
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PhaseError {
    #[error("phase {} failed: {}", .0.phase(), .0.label())]
    Failure(FailureCause),
    #[error(transparent)]
    Process(#[from] ProcessError),
}

impl From<FailureCause> for PhaseError {
    fn from(c: FailureCause) -> Self {
        PhaseError::Failure(c)
    }
}

/// The Phase-1 seed graph on `0..n'` and its strong 4-core partition.
#[derive(Clone, Debug)]
pub struct SeedGraph {
    pub graph: Graph,
    pub partition: CorePartition,
}

impl SeedGraph {
    /// Black / blue from the seed partition; everything else, including all
    /// vertices at or above `n'`, is uncovered.
    pub fn zones(&self, n: usize) -> Zones {
        let mut zone = vec![Zone::Uncovered; n];
        for &v in &self.partition.black {
            zone[v] = Zone::Black;
        }
        for &v in &self.partition.blue {
            zone[v] = Zone::Blue;
        }
        Zones::new(zone)
    }
}

/// Phase 1: while fewer than `target_phase1_edges` are selected, take the
/// first pair inside `0..n'`.
pub fn phase1(state: &mut ProcessState, b: &Budgets) -> Result<SeedGraph, PhaseError> {
    let seed = phase1_select(state, b)?;
    check_seed(&seed, b)?;
    Ok(seed)
}

/// The selection part of [`phase1`]; fails only on too few edges.
pub fn phase1_select(state: &mut ProcessState, b: &Budgets) -> Result<SeedGraph, PhaseError> {
    let n_prime = b.n_prime;
    let target = b.target_phase1_edges;
    let mut selected = 0usize;
    state.run_until(b.t1, |_, r| {
        if selected >= target {
            return None;
        }
        let pick = r
            .pairs
            .iter()
            .copied()
            .find(|&(u, v)| u < n_prime && v < n_prime);
        if pick.is_some() {
            selected += 1;
        }
        pick
    })?;
    let (seed, _) = state.builder().induced(&(0..n_prime).collect::<Vec<_>>());
    if seed.edge_count() < target {
        return Err(FailureCause::Phase1Edges {
            selected: seed.edge_count(),
            required: target,
        }
        .into());
    }
    let partition = strong_core(&seed, 4);
    Ok(SeedGraph {
        graph: seed,
        partition,
    })
}

/// The blue-set test closing [`phase1`].
pub fn check_seed(seed: &SeedGraph, b: &Budgets) -> Result<(), FailureCause> {
    let blue = seed.partition.blue.len();
    if (blue as f64) <= b.blue_threshold {
        return Err(FailureCause::Phase1Blue {
            blue,
            threshold: b.blue_threshold,
        });
    }
    Ok(())
}

/// Incremental state of the Phase-2 path forest.
struct Forest {
    degree: Vec<u8>,
    /// For a path endpoint: the other endpoint (itself when isolated).
    other_end: Vec<usize>,
    /// For a path endpoint: the number of edges on its path.
    length: Vec<usize>,
}

impl Forest {
    fn new(n: usize) -> Self {
        Forest {
            degree: vec![0; n],
            other_end: (0..n).collect(),
            length: vec![0; n],
        }
    }

    fn join(&mut self, u: usize, v: usize) {
        let a = self.other_end[u];
        let c = self.other_end[v];
        let len = self.length[u] + self.length[v] + 1;
        self.degree[u] += 1;
        self.degree[v] += 1;
        self.other_end[a] = c;
        self.other_end[c] = a;
        self.length[a] = len;
        self.length[c] = len;
    }
}

/// Phase 2: grow paths inside `U` by joining endpoints of distinct short paths.
pub fn phase2(
    state: &mut ProcessState,
    b: &Budgets,
    zones: &Zones,
) -> Result<PathSystem, PhaseError> {
    let mut forest = Forest::new(zones.n());
    let mut e2 = Vec::new();
    let long = b.long_path_threshold;
    state.run_until(b.t2, |_, r| {
        let pick = r.pairs.iter().copied().find(|&(u, v)| {
            zones.is_uncovered(u)
                && zones.is_uncovered(v)
                && forest.degree[u] <= 1
                && forest.degree[v] <= 1
                && (forest.length[u] as f64) < long
                && (forest.length[v] as f64) < long
                && forest.other_end[u] != v
        });
        if let Some((u, v)) = pick {
            forest.join(u, v);
            e2.push((u, v));
        }
        pick
    })?;
    let ps = PathSystem::from_phase2(zones, e2);
    if ps.paths.len() as f64 > b.path_cap {
        return Err(FailureCause::Phase2TooManyPaths {
            paths: ps.paths.len(),
            cap: b.path_cap,
        }
        .into());
    }
    Ok(ps)
}

/// Phase 3: attach `End` copies to unused blue vertices.
pub fn phase3(
    state: &mut ProcessState,
    b: &Budgets,
    zones: &Zones,
    ps: &mut PathSystem,
    pool: &mut BluePool,
) -> Result<(), PhaseError> {
    state.run_until(b.t3, |_, r| {
        let pick = r.pairs.iter().find_map(|&(u, v)| {
            if ps.end_multiplicity(u) > 0 && pool.contains(v) {
                Some((u, v))
            } else if ps.end_multiplicity(v) > 0 && pool.contains(u) {
                Some((v, u))
            } else {
                None
            }
        });
        pick.map(|(end, w)| {
            ps.consume_end(end);
            pool.take(w);
            ps.e3.push(edge(end, w));
            edge(end, w)
        })
    })?;
    ps.rederive(zones);
    let end = ps.end_size();
    if end as f64 > b.end_cap {
        return Err(FailureCause::Phase3EndTooLarge {
            end,
            cap: b.end_cap,
        }
        .into());
    }
    Ok(())
}

/// The claimable hit vertex of a Phase-4 pair `(v, w)` with `v` in `End`.
///
/// `w` must sit at position 2 or later of an unclaimed path so that its
/// predecessor is an interior (uncovered) vertex.
fn phase4_target(ps: &PathSystem, rw: &RewireState, w: usize) -> Option<Claim> {
    let path = ps.owner(w)?;
    let pos = ps.position(w);
    if !rw.is_claimable(path) || pos < 2 {
        return None;
    }
    Some(Claim {
        path,
        hit: w,
        pred: ps.paths[path][pos - 1],
    })
}

/// Phase 4: each `End` copy collects links into distinct unclaimed paths.
pub fn phase4(
    state: &mut ProcessState,
    b: &Budgets,
    ps: &PathSystem,
    rw: &mut RewireState,
) -> Result<(), PhaseError> {
    let cap = b.fanout_required;
    state.run_until(b.t4, |_, r| {
        for &(a, c) in &r.pairs {
            for (v, w) in [(a, c), (c, a)] {
                let Some(copy) = rw.copy_with_room(v, cap) else {
                    continue;
                };
                if let Some(claim) = phase4_target(ps, rw, w) {
                    rw.add_claim(copy, claim, edge(v, w));
                    return Some(edge(v, w));
                }
            }
        }
        None
    })?;
    let deficient: Vec<&EndCopy> = rw.copies.iter().filter(|c| c.claims.len() < cap).collect();
    if let Some(worst) = deficient.iter().min_by_key(|c| (c.claims.len(), c.vertex)) {
        return Err(FailureCause::Phase4Fanout {
            vertex: worst.vertex,
            claims: worst.claims.len(),
            required: cap,
            deficient_copies: deficient.len(),
        }
        .into());
    }
    Ok(())
}

/// Phase 5: for each copy, join one claimed predecessor to an unused blue vertex.
pub fn phase5(
    state: &mut ProcessState,
    b: &Budgets,
    rw: &mut RewireState,
    pool: &mut BluePool,
) -> Result<(), PhaseError> {
    state.run_until(b.t5, |_, r| {
        let pick = r.pairs.iter().find_map(|&(u, v)| {
            if rw.claim_at(u).is_some() && pool.contains(v) {
                Some((u, v))
            } else if rw.claim_at(v).is_some() && pool.contains(u) {
                Some((v, u))
            } else {
                None
            }
        });
        pick.map(|(x, y)| {
            rw.resolve(x, y);
            pool.take(y);
            edge(x, y)
        })
    })?;
    let unresolved = rw.unresolved();
    if unresolved > 0 {
        return Err(FailureCause::Phase5Unresolved { unresolved }.into());
    }
    Ok(())
}
