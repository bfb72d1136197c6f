//! Strong k-cores and the black / blue / red vertex partition.
//!
//! The strong k-core of `G` is the largest `S` such that every vertex of
//! `S ∪ N(S)` has at least `k` neighbours in `S`. Black is `S`, blue is
//! `N(S) \ S` and red is everything else.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::Graph;

/// Largest graph accepted by [`strong_core_bruteforce`].
pub const BRUTEFORCE_MAX_N: usize = 20;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CoreError {
    #[error("brute-force strong core needs n <= {BRUTEFORCE_MAX_N}, got {0}")]
    InstanceTooLarge(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VertexClass {
    Black,
    Blue,
    Red,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorePartition {
    pub k: usize,
    pub black: Vec<usize>,
    pub blue: Vec<usize>,
    pub red: Vec<usize>,
    class: Vec<VertexClass>,
}

impl CorePartition {
    fn from_core(g: &Graph, k: usize, in_core: &[bool]) -> Self {
        let n = g.n();
        let mut class = vec![VertexClass::Red; n];
        for v in 0..n {
            if in_core[v] {
                class[v] = VertexClass::Black;
            } else if g.neighbors(v).iter().any(|&w| in_core[w]) {
                class[v] = VertexClass::Blue;
            }
        }
        let pick = |c: VertexClass| (0..n).filter(|&v| class[v] == c).collect::<Vec<_>>();
        CorePartition {
            k,
            black: pick(VertexClass::Black),
            blue: pick(VertexClass::Blue),
            red: pick(VertexClass::Red),
            class,
        }
    }

    #[inline]
    pub fn class(&self, v: usize) -> VertexClass {
        self.class[v]
    }

    pub fn is_black(&self, v: usize) -> bool {
        self.class[v] == VertexClass::Black
    }

    pub fn is_blue(&self, v: usize) -> bool {
        self.class[v] == VertexClass::Blue
    }

    pub fn n(&self) -> usize {
        self.class.len()
    }

    /// Checks the partition and defining-property invariants against `g`.
    pub fn check(&self, g: &Graph) -> Result<(), String> {
        if self.n() != g.n() {
            return Err(format!(
                "partition covers {} vertices, graph has {}",
                self.n(),
                g.n()
            ));
        }
        if self.black.len() + self.blue.len() + self.red.len() != g.n() {
            return Err("black/blue/red do not partition the vertex set".into());
        }
        for v in 0..g.n() {
            let in_s = g.neighbors(v).iter().filter(|&&w| self.is_black(w)).count();
            match self.class(v) {
                VertexClass::Black | VertexClass::Blue if in_s < self.k => {
                    return Err(format!(
                        "vertex {v} has only {in_s} < {} core neighbours",
                        self.k
                    ));
                }
                VertexClass::Blue if in_s == 0 => {
                    return Err(format!("blue vertex {v} has no core neighbour"));
                }
                VertexClass::Red if in_s > 0 => {
                    return Err(format!("red vertex {v} touches the core"));
                }
                _ => {}
            }
        }
        Ok(())
    }
}

/// Computes the strong k-core by peeling to a fixed point.
///
/// Two removal rules, both safe for the maximal core `S*`:
/// a vertex of `S` with fewer than `k` neighbours in `S` cannot be in `S*`,
/// and a vertex outside `S` that sees `S` but fewer than `k` times cannot be in
/// `N(S*)`, so none of its `S`-neighbours can be in `S*`.
pub fn strong_core(g: &Graph, k: usize) -> CorePartition {
    assert!(k >= 1, "strong core needs k >= 1");
    let n = g.n();
    let mut in_core = vec![true; n];
    let mut core_deg: Vec<usize> = (0..n).map(|v| g.degree(v)).collect();
    let mut queued = vec![true; n];
    let mut work: VecDeque<usize> = (0..n).collect();

    fn evict(
        g: &Graph,
        v: usize,
        in_core: &mut [bool],
        core_deg: &mut [usize],
        queued: &mut [bool],
        work: &mut VecDeque<usize>,
    ) {
        in_core[v] = false;
        for &w in g.neighbors(v) {
            core_deg[w] -= 1;
            if !queued[w] {
                queued[w] = true;
                work.push_back(w);
            }
        }
        if !queued[v] {
            queued[v] = true;
            work.push_back(v);
        }
    }

    while let Some(u) = work.pop_front() {
        queued[u] = false;
        let d = core_deg[u];
        if d >= k {
            continue;
        }
        if in_core[u] {
            evict(g, u, &mut in_core, &mut core_deg, &mut queued, &mut work);
        } else if d > 0 {
            for &w in g.neighbors(u) {
                if in_core[w] {
                    evict(g, w, &mut in_core, &mut core_deg, &mut queued, &mut work);
                }
            }
        }
    }
    CorePartition::from_core(g, k, &in_core)
}

/// Exhaustive strong core: the union of every vertex set with the defining
/// property. Exponential; for cross-checking [`strong_core`] on small graphs.
pub fn strong_core_bruteforce(g: &Graph, k: usize) -> Result<Vec<usize>, CoreError> {
    let n = g.n();
    if n > BRUTEFORCE_MAX_N {
        return Err(CoreError::InstanceTooLarge(n));
    }
    let adj: Vec<u32> = (0..n)
        .map(|v| g.neighbors(v).iter().fold(0u32, |m, &w| m | (1 << w)))
        .collect();
    let mut union = 0u32;
    for s in 1u32..(1u32 << n) {
        if s & !union == 0 {
            continue;
        }
        let mut closure = s;
        let mut bits = s;
        while bits != 0 {
            let v = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            closure |= adj[v];
        }
        let mut ok = true;
        let mut bits = closure;
        while bits != 0 {
            let v = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            if ((adj[v] & s).count_ones() as usize) < k {
                ok = false;
                break;
            }
        }
        if ok {
            union |= s;
        }
    }
    Ok((0..n).filter(|&v| union & (1 << v) != 0).collect())
}
