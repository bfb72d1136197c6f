//! Hamilton cycles that must traverse a prescribed matching.
//!
//! [`complete_cycle`] looks for a Hamilton cycle of `G ∪ M` that uses every
//! edge of the forced matching `M`. Each forced pair is glued into a unit that
//! a cycle enters through one side and leaves through the other. Small
//! instances are decided exactly; larger ones go to a randomized
//! rotation–extension search with a step budget.

mod exact;
mod posa;

use std::collections::HashMap;
use std::time::Duration;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{edge, Edge, Graph};

pub use exact::{exact_hamilton, EXACT_MAX_N};

/// Instances with at most this many units are searched exhaustively.
pub const EXHAUSTIVE_MAX_UNITS: usize = 18;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CycleError {
    #[error("no Hamilton cycle found within {steps} search steps")]
    NotFound { steps: u64 },
    #[error("invalid forced matching: {0}")]
    InvalidMatching(String),
    #[error("forced edge {0:?} is not traversed by the cycle")]
    NotTraversed(Edge),
    #[error("exact search needs n <= {max}, got {n}")]
    TooLarge { n: usize, max: usize },
}

/// A set of vertex-disjoint pairs the cycle must traverse.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ForcedMatching {
    pairs: Vec<Edge>,
    partner: Vec<Option<usize>>,
}

impl ForcedMatching {
    pub fn empty(n: usize) -> Self {
        ForcedMatching {
            pairs: Vec::new(),
            partner: vec![None; n],
        }
    }

    pub fn new<I>(n: usize, pairs: I) -> Result<Self, CycleError>
    where
        I: IntoIterator<Item = Edge>,
    {
        let mut m = ForcedMatching::empty(n);
        for (u, v) in pairs {
            if u >= n || v >= n {
                return Err(CycleError::InvalidMatching(format!(
                    "pair ({u}, {v}) outside 0..{n}"
                )));
            }
            if u == v {
                return Err(CycleError::InvalidMatching(format!("loop at {u}")));
            }
            if m.partner[u].is_some() || m.partner[v].is_some() {
                return Err(CycleError::InvalidMatching(format!(
                    "pair ({u}, {v}) overlaps another pair"
                )));
            }
            m.partner[u] = Some(v);
            m.partner[v] = Some(u);
            m.pairs.push(edge(u, v));
        }
        Ok(m)
    }

    pub fn pairs(&self) -> &[Edge] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    #[inline]
    pub fn partner(&self, v: usize) -> Option<usize> {
        self.partner.get(v).copied().flatten()
    }

    pub fn n(&self) -> usize {
        self.partner.len()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CycleCertificate {
    pub order: Vec<usize>,
}

impl CycleCertificate {
    pub fn new(order: Vec<usize>) -> Self {
        CycleCertificate { order }
    }

    /// Consecutive pairs of the cycle, including the closing one.
    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        let len = self.order.len();
        (0..len).map(move |i| edge(self.order[i], self.order[(i + 1) % len]))
    }

    /// True iff this is a Hamilton cycle of `g ∪ m` that traverses all of `m`.
    pub fn spans(&self, g: &Graph, m: &ForcedMatching) -> bool {
        if !visits_each_once(g.n(), &self.order) {
            return false;
        }
        let mut traversed = 0;
        for (u, v) in self.edges() {
            if m.partner(u) == Some(v) {
                traversed += 1;
            } else if !g.has_edge(u, v) {
                return false;
            }
        }
        traversed == m.len()
    }
}

fn visits_each_once(n: usize, order: &[usize]) -> bool {
    if n < 3 || order.len() != n {
        return false;
    }
    let mut seen = vec![false; n];
    for &v in order {
        if v >= n || std::mem::replace(&mut seen[v], true) {
            return false;
        }
    }
    true
}

/// True iff `c` visits every vertex of `g` once and consecutive vertices
/// (cyclically) are adjacent in `g`.
pub fn verify_hamilton(g: &Graph, c: &CycleCertificate) -> bool {
    visits_each_once(g.n(), &c.order) && c.edges().all(|(u, v)| g.has_edge(u, v))
}

/// Work limits for [`complete_cycle`]. The step limit is what makes results
/// reproducible; the wall-clock limit is a safety net.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CycleBudget {
    pub max_steps: u64,
    pub max_time: Option<Duration>,
}

impl Default for CycleBudget {
    fn default() -> Self {
        CycleBudget {
            max_steps: 5_000_000,
            max_time: Some(Duration::from_secs(30)),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchMethod {
    Exhaustive,
    RotationExtension,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CycleFound {
    pub certificate: CycleCertificate,
    pub method: SearchMethod,
    pub steps: u64,
}

/// Finds a Hamilton cycle of `g ∪ m` traversing every pair of `m`.
pub fn complete_cycle<R: Rng>(
    g: &Graph,
    m: &ForcedMatching,
    budget: CycleBudget,
    rng: &mut R,
) -> Result<CycleFound, CycleError> {
    complete_cycle_with(g, m, budget, EXHAUSTIVE_MAX_UNITS, rng)
}

/// As [`complete_cycle`], with the exhaustive cut-over set explicitly.
/// `exhaustive_max_units = 0` always uses rotation–extension.
pub fn complete_cycle_with<R: Rng>(
    g: &Graph,
    m: &ForcedMatching,
    budget: CycleBudget,
    exhaustive_max_units: usize,
    rng: &mut R,
) -> Result<CycleFound, CycleError> {
    if m.n() != g.n() {
        return Err(CycleError::InvalidMatching(format!(
            "matching is over {} vertices, graph has {}",
            m.n(),
            g.n()
        )));
    }
    let n = g.n();
    if n < 3 {
        return Err(CycleError::NotFound { steps: 0 });
    }
    let units = n - m.len();
    let found = if units <= exhaustive_max_units {
        let order = exact::exhaustive_units(g, m).ok_or(CycleError::NotFound { steps: 1 })?;
        CycleFound {
            certificate: CycleCertificate::new(order),
            method: SearchMethod::Exhaustive,
            steps: 1,
        }
    } else {
        let (order, steps) = posa::search(g, m, budget, rng)?;
        CycleFound {
            certificate: CycleCertificate::new(order),
            method: SearchMethod::RotationExtension,
            steps,
        }
    };
    assert!(
        found.certificate.spans(g, m),
        "cycle search returned an invalid certificate"
    );
    Ok(found)
}

/// Replaces each forced edge of `h` by the path joining its endpoints.
///
/// `paths` must be exactly the paths whose endpoint pairs form `m`; `h` must
/// traverse every pair of `m`. Vertex labels of `h`, `m` and `paths` agree.
pub fn substitute_paths(
    h: &CycleCertificate,
    m: &ForcedMatching,
    paths: &[Vec<usize>],
) -> Result<CycleCertificate, CycleError> {
    if paths.len() != m.len() {
        return Err(CycleError::InvalidMatching(format!(
            "{} paths for {} forced pairs",
            paths.len(),
            m.len()
        )));
    }
    let mut by_pair: HashMap<Edge, usize> = HashMap::with_capacity(paths.len());
    for (i, p) in paths.iter().enumerate() {
        let (Some(&a), Some(&b)) = (p.first(), p.last()) else {
            return Err(CycleError::InvalidMatching("empty path".into()));
        };
        if m.partner(a) != Some(b) {
            return Err(CycleError::InvalidMatching(format!(
                "path endpoints ({a}, {b}) are not a forced pair"
            )));
        }
        by_pair.insert(edge(a, b), i);
    }
    let len = h.order.len();
    let extra: usize = paths.iter().map(|p| p.len().saturating_sub(2)).sum();
    let mut out = Vec::with_capacity(len + extra);
    let mut used = vec![false; paths.len()];
    for i in 0..len {
        let u = h.order[i];
        let v = h.order[(i + 1) % len];
        out.push(u);
        if let Some(&pi) = by_pair.get(&edge(u, v)) {
            if m.partner(u) != Some(v) || used[pi] {
                continue;
            }
            used[pi] = true;
            let p = &paths[pi];
            let interior = &p[1..p.len() - 1];
            if p[0] == u {
                out.extend_from_slice(interior);
            } else {
                out.extend(interior.iter().rev());
            }
        }
    }
    if let Some(pi) = used.iter().position(|&u| !u) {
        let p = &paths[pi];
        return Err(CycleError::NotTraversed(edge(p[0], p[p.len() - 1])));
    }
    Ok(CycleCertificate::new(out))
}
