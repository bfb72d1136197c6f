//! Path covers of the uncovered set `U` and the Phase 4/5 rewiring ledger.

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{edge, Edge};

/// Role of a vertex relative to the seed graph's strong 4-core.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Zone {
    /// In the strong 4-core of the seed graph.
    Black,
    /// Next to the core but outside it; the set `W` paths must end in.
    Blue,
    /// Everything else, including every vertex outside the seed graph.
    Uncovered,
}

/// Zone of every vertex of the full graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Zones {
    zone: Vec<Zone>,
}

impl Zones {
    pub fn new(zone: Vec<Zone>) -> Self {
        Zones { zone }
    }

    #[inline]
    pub fn get(&self, v: usize) -> Zone {
        self.zone[v]
    }

    #[inline]
    pub fn is_uncovered(&self, v: usize) -> bool {
        self.zone[v] == Zone::Uncovered
    }

    #[inline]
    pub fn is_blue(&self, v: usize) -> bool {
        self.zone[v] == Zone::Blue
    }

    pub fn n(&self) -> usize {
        self.zone.len()
    }

    pub fn members(&self, z: Zone) -> Vec<usize> {
        (0..self.n()).filter(|&v| self.zone[v] == z).collect()
    }

    pub fn count(&self, z: Zone) -> usize {
        self.zone.iter().filter(|&&x| x == z).count()
    }
}

/// Blue vertices not yet used as a path endpoint.
#[derive(Clone, Debug)]
pub struct BluePool {
    available: Vec<bool>,
    count: usize,
}

impl BluePool {
    pub fn new(zones: &Zones) -> Self {
        let available: Vec<bool> = (0..zones.n()).map(|v| zones.is_blue(v)).collect();
        let count = available.iter().filter(|&&a| a).count();
        BluePool { available, count }
    }

    #[inline]
    pub fn contains(&self, v: usize) -> bool {
        self.available[v]
    }

    pub fn take(&mut self, v: usize) {
        assert!(self.available[v], "blue vertex {v} already used");
        self.available[v] = false;
        self.count -= 1;
    }

    pub fn len(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }
}

/// Vertex-disjoint paths covering `U`, spanned by the Phase-2 and Phase-3 edges.
#[derive(Clone, Debug)]
pub struct PathSystem {
    /// Paths oriented lower endpoint first; a single vertex is a path of length 0.
    pub paths: Vec<Vec<usize>>,
    owner: Vec<Option<usize>>,
    position: Vec<usize>,
    /// Copies of each vertex still in `End`: 2 for an untouched isolated
    /// vertex, 1 for an unmatched endpoint of a longer path, else 0.
    end_mult: Vec<u8>,
    pub e2: Vec<Edge>,
    pub e3: Vec<Edge>,
}

impl PathSystem {
    /// The maximal path set spanned by `e2` over the uncovered vertices.
    pub fn from_phase2(zones: &Zones, e2: Vec<Edge>) -> Self {
        let n = zones.n();
        let mut ps = PathSystem {
            paths: Vec::new(),
            owner: vec![None; n],
            position: vec![0; n],
            end_mult: vec![0; n],
            e2,
            e3: Vec::new(),
        };
        ps.rederive(zones);
        for p in &ps.paths {
            if p.len() == 1 {
                ps.end_mult[p[0]] = 2;
            } else {
                ps.end_mult[p[0]] = 1;
                ps.end_mult[p[p.len() - 1]] = 1;
            }
        }
        ps
    }

    /// Recomputes `paths` from `e2 ∪ e3`. End multiplicities are unaffected.
    pub fn rederive(&mut self, zones: &Zones) {
        let n = zones.n();
        let mut adj: HashMap<usize, Vec<usize>> = HashMap::new();
        for &(u, v) in self.e2.iter().chain(&self.e3) {
            adj.entry(u).or_default().push(v);
            adj.entry(v).or_default().push(u);
        }
        let nbrs = |v: usize| adj.get(&v).map(Vec::as_slice).unwrap_or(&[]);
        self.paths.clear();
        self.owner.iter_mut().for_each(|o| *o = None);
        let mut seen = vec![false; n];
        for s in 0..n {
            if seen[s] || !zones.is_uncovered(s) {
                continue;
            }
            // Walk to one end, then collect towards the other.
            let mut prev = usize::MAX;
            let mut cur = s;
            loop {
                let next = nbrs(cur).iter().copied().find(|&w| w != prev);
                match next {
                    Some(w) if w != s => {
                        prev = cur;
                        cur = w;
                    }
                    Some(_) => panic!("phase 2/3 edges close a cycle through {s}"),
                    None => break,
                }
            }
            let mut path = vec![cur];
            seen[cur] = true;
            let mut prev = usize::MAX;
            loop {
                let here = *path.last().expect("nonempty");
                let next = nbrs(here).iter().copied().find(|&w| w != prev);
                match next {
                    Some(w) => {
                        assert!(!seen[w], "phase 2/3 edges are not a path forest at {w}");
                        seen[w] = true;
                        prev = here;
                        path.push(w);
                    }
                    None => break,
                }
            }
            if path[0] > path[path.len() - 1] {
                path.reverse();
            }
            let id = self.paths.len();
            for (i, &v) in path.iter().enumerate() {
                self.owner[v] = Some(id);
                self.position[v] = i;
            }
            self.paths.push(path);
        }
    }

    #[inline]
    pub fn owner(&self, v: usize) -> Option<usize> {
        self.owner[v]
    }

    #[inline]
    pub fn position(&self, v: usize) -> usize {
        self.position[v]
    }

    #[inline]
    pub fn end_multiplicity(&self, v: usize) -> u8 {
        self.end_mult[v]
    }

    /// Removes one copy of `v` from `End`.
    pub fn consume_end(&mut self, v: usize) {
        assert!(self.end_mult[v] > 0, "vertex {v} is not in End");
        self.end_mult[v] -= 1;
    }

    /// Size of the `End` multiset.
    pub fn end_size(&self) -> usize {
        self.end_mult.iter().map(|&m| m as usize).sum()
    }

    /// `End` as (vertex, multiplicity), ascending.
    pub fn end_entries(&self) -> Vec<(usize, u8)> {
        self.end_mult
            .iter()
            .enumerate()
            .filter(|(_, &m)| m > 0)
            .map(|(v, &m)| (v, m))
            .collect()
    }
}

/// A Phase-4 link from an `End` copy into a path it may be rerouted through.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Claim {
    pub path: usize,
    /// The vertex hit by the Phase-4 edge.
    pub hit: usize,
    /// Its predecessor on the claimed path; a Phase-5 edge from here into
    /// `W` splits the claimed path.
    pub pred: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EndCopy {
    pub vertex: usize,
    pub claims: Vec<Claim>,
    /// The Phase-5 edge `(pred, y)` and the claim it used.
    pub resolved: Option<(Claim, usize)>,
}

/// Phase 4/5 bookkeeping: per-copy fanout and the E⁺ / E⁻ ledger.
#[derive(Clone, Debug)]
pub struct RewireState {
    pub copies: Vec<EndCopy>,
    copies_of: HashMap<usize, Vec<usize>>,
    /// Paths with no endpoint in `End` that no copy has claimed yet.
    p_plus: Vec<bool>,
    /// Claimed predecessor vertex → (copy, claim index), unresolved copies only.
    by_pred: HashMap<usize, (usize, usize)>,
    pub e4: Vec<Edge>,
    pub e_plus: Vec<Edge>,
    pub e_minus: Vec<Edge>,
}

impl RewireState {
    pub fn new(ps: &PathSystem) -> Self {
        let mut copies = Vec::new();
        let mut copies_of: HashMap<usize, Vec<usize>> = HashMap::new();
        for (v, mult) in ps.end_entries() {
            for _ in 0..mult {
                copies_of.entry(v).or_default().push(copies.len());
                copies.push(EndCopy {
                    vertex: v,
                    claims: Vec::new(),
                    resolved: None,
                });
            }
        }
        let p_plus = ps
            .paths
            .iter()
            .map(|p| ps.end_multiplicity(p[0]) == 0 && ps.end_multiplicity(p[p.len() - 1]) == 0)
            .collect();
        RewireState {
            copies,
            copies_of,
            p_plus,
            by_pred: HashMap::new(),
            e4: Vec::new(),
            e_plus: Vec::new(),
            e_minus: Vec::new(),
        }
    }

    pub fn is_claimable(&self, path: usize) -> bool {
        self.p_plus[path]
    }

    pub fn claimable_count(&self) -> usize {
        self.p_plus.iter().filter(|&&b| b).count()
    }

    /// First copy of `v` with fewer than `cap` claims.
    pub fn copy_with_room(&self, v: usize, cap: usize) -> Option<usize> {
        self.copies_of
            .get(&v)?
            .iter()
            .copied()
            .find(|&c| self.copies[c].claims.len() < cap)
    }

    pub fn add_claim(&mut self, copy: usize, claim: Claim, link: Edge) {
        assert!(self.p_plus[claim.path], "path {} claimed twice", claim.path);
        self.p_plus[claim.path] = false;
        let idx = self.copies[copy].claims.len();
        self.copies[copy].claims.push(claim);
        self.by_pred.insert(claim.pred, (copy, idx));
        self.e4.push(link);
    }

    /// The unresolved copy and claim whose predecessor vertex is `x`.
    pub fn claim_at(&self, x: usize) -> Option<(usize, usize)> {
        self.by_pred.get(&x).copied()
    }

    /// Records the Phase-5 edge `x y` for the claim at `x` and retires the copy.
    pub fn resolve(&mut self, x: usize, y: usize) {
        let (copy, idx) = self.by_pred[&x];
        let claim = self.copies[copy].claims[idx];
        let v = self.copies[copy].vertex;
        self.e_plus.push(edge(x, y));
        self.e_plus.push(edge(v, claim.hit));
        self.e_minus.push(edge(claim.pred, claim.hit));
        self.copies[copy].resolved = Some((claim, y));
        for c in &self.copies[copy].claims {
            self.by_pred.remove(&c.pred);
        }
    }

    pub fn unresolved(&self) -> usize {
        self.copies.iter().filter(|c| c.resolved.is_none()).count()
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AssemblyError {
    #[error("assembled edges contain a cycle through vertex {0}")]
    Cycle(usize),
    #[error("vertex {vertex} ({zone:?}) has degree {degree} in the assembled paths")]
    Degree {
        vertex: usize,
        zone: Zone,
        degree: usize,
    },
    #[error("path endpoint {0} is not blue")]
    Endpoint(usize),
    #[error("removed edge {0:?} was never selected")]
    UnknownRemoval(Edge),
}

/// `E_P = (E2 ∪ E3 ∪ E⁺) \ E⁻`, split into paths and checked: every uncovered
/// vertex has degree 2, blue vertices at most 1, core vertices 0, and every
/// path runs between two blue vertices.
pub fn assemble_paths(
    ps: &PathSystem,
    rw: &RewireState,
    zones: &Zones,
) -> Result<Vec<Vec<usize>>, AssemblyError> {
    let n = zones.n();
    let minus: HashSet<Edge> = rw.e_minus.iter().copied().collect();
    let mut edges: Vec<Edge> = ps.e2.iter().chain(&ps.e3).copied().collect();
    for &e in &minus {
        if !edges.contains(&e) && !rw.e_plus.contains(&e) {
            return Err(AssemblyError::UnknownRemoval(e));
        }
    }
    edges.retain(|e| !minus.contains(e));
    edges.extend(rw.e_plus.iter().filter(|e| !minus.contains(e)));

    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for &(u, v) in &edges {
        adj[u].push(v);
        adj[v].push(u);
    }
    for (v, nbrs) in adj.iter().enumerate() {
        let zone = zones.get(v);
        let degree = nbrs.len();
        let ok = match zone {
            Zone::Uncovered => degree == 2,
            Zone::Blue => degree <= 1,
            Zone::Black => degree == 0,
        };
        if !ok {
            return Err(AssemblyError::Degree {
                vertex: v,
                zone,
                degree,
            });
        }
    }
    // Max degree is 2, so each component is a path or a cycle. A component
    // of blue endpoints with only uncovered interiors is walked from a blue end;
    // any uncovered vertex left unvisited afterwards sits on a cycle.
    let mut seen = vec![false; n];
    let mut paths = Vec::new();
    for s in 0..n {
        if seen[s] || adj[s].len() != 1 {
            continue;
        }
        let mut path = vec![s];
        seen[s] = true;
        let mut prev = usize::MAX;
        let mut cur = s;
        while let Some(&w) = adj[cur].iter().find(|&&w| w != prev) {
            seen[w] = true;
            path.push(w);
            prev = cur;
            cur = w;
        }
        for &end in [path[0], path[path.len() - 1]].iter() {
            if !zones.is_blue(end) {
                return Err(AssemblyError::Endpoint(end));
            }
        }
        if path[0] > path[path.len() - 1] {
            path.reverse();
        }
        paths.push(path);
    }
    if let Some(v) = (0..n).find(|&v| !seen[v] && !adj[v].is_empty()) {
        return Err(AssemblyError::Cycle(v));
    }
    paths.sort_unstable_by_key(|p| p[0]);
    Ok(paths)
}
