//! Randomized rotation–extension search with forced pairs.
//!
//! The path always contains both or neither vertex of each forced pair, and
//! forced partners sit next to each other. Extensions append a whole unit;
//! a rotation at path position `i` breaks the edge `path[i] path[i+1]`, which
//! is therefore never allowed to be a forced pair.

use std::time::Instant;

use rand::seq::SliceRandom;
use rand::Rng;

use super::{CycleBudget, CycleError, ForcedMatching};
use crate::graph::Graph;

const NOT_ON_PATH: usize = usize::MAX;

struct Search<'a> {
    g: &'a Graph,
    m: &'a ForcedMatching,
    path: Vec<usize>,
    pos: Vec<usize>,
    /// Neighbours of `v` not yet on the path.
    free_deg: Vec<usize>,
}

impl<'a> Search<'a> {
    fn new(g: &'a Graph, m: &'a ForcedMatching) -> Self {
        let n = g.n();
        Search {
            g,
            m,
            path: Vec::with_capacity(n),
            pos: vec![NOT_ON_PATH; n],
            free_deg: (0..n).map(|v| g.degree(v)).collect(),
        }
    }

    fn reset(&mut self) {
        for &v in &self.path {
            self.pos[v] = NOT_ON_PATH;
        }
        self.path.clear();
        for v in 0..self.g.n() {
            self.free_deg[v] = self.g.degree(v);
        }
    }

    fn push(&mut self, v: usize) {
        self.pos[v] = self.path.len();
        self.path.push(v);
        for &w in self.g.neighbors(v) {
            self.free_deg[w] -= 1;
        }
    }

    /// Appends the unit entered at `v`.
    fn push_unit(&mut self, v: usize) {
        self.push(v);
        if let Some(p) = self.m.partner(v) {
            self.push(p);
        }
    }

    fn exit_of(&self, v: usize) -> usize {
        self.m.partner(v).unwrap_or(v)
    }

    fn reverse_range(&mut self, from: usize) {
        self.path[from..].reverse();
        for i in from..self.path.len() {
            self.pos[self.path[i]] = i;
        }
    }

    /// Best unit to append after `end`: fewest free neighbours at its exit side.
    fn extension<R: Rng>(&self, end: usize, rng: &mut R) -> Option<usize> {
        let mut best: Option<(usize, usize)> = None;
        let mut ties = 0u32;
        for &u in self.g.neighbors(end) {
            if self.pos[u] != NOT_ON_PATH {
                continue;
            }
            let key = self.free_deg[self.exit_of(u)];
            match best {
                Some((k, _)) if key > k => {}
                Some((k, _)) if key == k => {
                    ties += 1;
                    if rng.gen_range(0..=ties) == 0 {
                        best = Some((key, u));
                    }
                }
                _ => {
                    best = Some((key, u));
                    ties = 0;
                }
            }
        }
        best.map(|(_, u)| u)
    }

    /// Path positions `i` such that rotating on the edge `end path[i]` is legal.
    fn rotation_pivots(&self, end: usize, out: &mut Vec<usize>) {
        out.clear();
        let last = self.path.len() - 1;
        for &y in self.g.neighbors(end) {
            let i = self.pos[y];
            if i == NOT_ON_PATH || i + 1 >= last {
                continue;
            }
            if self.m.partner(y) == Some(self.path[i + 1]) {
                continue;
            }
            out.push(i);
        }
    }

    fn closes(&self) -> bool {
        let n = self.g.n();
        self.path.len() == n && self.g.has_edge(self.path[0], self.path[n - 1])
    }

    /// After rotating at `i`, the new endpoint is `path[i+1]`.
    fn pivot_is_useful(&self, i: usize) -> bool {
        let new_end = self.path[i + 1];
        if self.path.len() == self.g.n() {
            self.g.has_edge(new_end, self.path[0])
        } else {
            self.free_deg[new_end] > 0
        }
    }
}

pub(super) fn search<R: Rng>(
    g: &Graph,
    m: &ForcedMatching,
    budget: CycleBudget,
    rng: &mut R,
) -> Result<(Vec<usize>, u64), CycleError> {
    let n = g.n();
    let started = Instant::now();
    let stall_limit = 4 * n as u64 + 1_000;
    let mut s = Search::new(g, m);
    let mut pivots = Vec::new();
    let mut useful = Vec::new();
    let mut steps = 0u64;

    // Any vertex with fewer than two usable edges rules out a Hamilton cycle.
    let hopeless = (0..n).any(|v| {
        let forced = usize::from(m.partner(v).is_some());
        let own = g
            .neighbors(v)
            .iter()
            .filter(|&&w| m.partner(v) != Some(w))
            .count();
        own + forced < 2
    });
    if hopeless {
        return Err(CycleError::NotFound { steps: 0 });
    }

    loop {
        s.reset();
        let start = rng.gen_range(0..n);
        s.push_unit(start);
        let mut stall = 0u64;
        loop {
            if steps >= budget.max_steps {
                return Err(CycleError::NotFound { steps });
            }
            if steps.is_multiple_of(4096) {
                if let Some(limit) = budget.max_time {
                    if started.elapsed() > limit {
                        return Err(CycleError::NotFound { steps });
                    }
                }
            }
            steps += 1;

            if s.closes() {
                return Ok((s.path.clone(), steps));
            }
            let end = *s.path.last().expect("path is never empty");
            if let Some(u) = s.extension(end, rng) {
                s.push_unit(u);
                stall = 0;
                continue;
            }
            // Try growing from the other end before rotating.
            let front = s.path[0];
            if s.path.len() < n && s.free_deg[front] > 0 {
                s.reverse_range(0);
                continue;
            }
            stall += 1;
            if stall > stall_limit {
                break;
            }
            s.rotation_pivots(end, &mut pivots);
            if pivots.is_empty() {
                // Dead end on this side; flip and rotate from the front next time.
                s.reverse_range(0);
                continue;
            }
            useful.clear();
            useful.extend(pivots.iter().copied().filter(|&i| s.pivot_is_useful(i)));
            let i = if useful.is_empty() {
                *pivots.choose(rng).expect("nonempty")
            } else {
                *useful.choose(rng).expect("nonempty")
            };
            s.reverse_range(i + 1);
        }
    }
}
