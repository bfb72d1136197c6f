//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use semirandom_ham::budgets::Budgets;
use semirandom_ham::process::Selection;
use semirandom_ham::report::{Certificate, Outcome, RunReport};
use semirandom_ham::{edge, Edge, Graph};

pub fn gnp(n: usize, p: f64, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = Graph::new(n);
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                g.add_edge(u, v).unwrap();
            }
        }
    }
    g
}

/// Strong k-core by repeated full sweeps of both removal rules. Quadratic
/// and deliberately simple.
pub fn naive_strong_core(g: &Graph, k: usize) -> Vec<bool> {
    let n = g.n();
    let mut s = vec![true; n];
    loop {
        let deg: Vec<usize> = (0..n)
            .map(|v| g.neighbors(v).iter().filter(|&&w| s[w]).count())
            .collect();
        let mut changed = false;
        for v in 0..n {
            if s[v] && deg[v] < k {
                s[v] = false;
                changed = true;
            }
            if !s[v] && deg[v] > 0 && deg[v] < k {
                for &w in g.neighbors(v) {
                    if s[w] {
                        s[w] = false;
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            return s;
        }
    }
}

/// True iff every vertex of `s ∪ N(s)` has at least `k` neighbours in `s`.
pub fn has_core_property(g: &Graph, s: &[bool], k: usize) -> bool {
    (0..g.n()).all(|v| {
        let inside = g.neighbors(v).iter().filter(|&&w| s[w]).count();
        let touched = s[v] || inside > 0;
        !touched || inside >= k
    })
}

/// The Phase-1 seed graph rebuilt from the log alone.
pub fn seed_graph_from_log(log: &[Selection], b: &Budgets) -> Graph {
    let mut g = Graph::new(b.n_prime);
    for s in log.iter().filter(|s| s.round <= b.t1) {
        let (u, v) = s.edge;
        if u < b.n_prime && v < b.n_prime {
            g.add_edge(u, v).unwrap();
        }
    }
    g
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Role {
    Black,
    Blue,
    Uncovered,
}

/// Zones of all `n` vertices, recomputed from the log with the naive core.
pub fn zones_from_log(log: &[Selection], b: &Budgets) -> Vec<Role> {
    let g = seed_graph_from_log(log, b);
    let s = naive_strong_core(&g, 4);
    (0..b.n)
        .map(|v| {
            if v >= b.n_prime {
                Role::Uncovered
            } else if s[v] {
                Role::Black
            } else if g.neighbors(v).iter().any(|&w| s[w]) {
                Role::Blue
            } else {
                Role::Uncovered
            }
        })
        .collect()
}

/// Selections per phase window, from the log and the budget table.
pub fn edges_per_phase(log: &[Selection], b: &Budgets) -> [usize; 5] {
    let mut out = [0; 5];
    for s in log {
        let p = b.phase_of_round(s.round).expect("selection past t5");
        out[p - 1] += 1;
    }
    out
}

/// Audits a successful Hamilton trial from its log and certificate only.
///
/// `E_P` is read off the cycle as the edges touching an uncovered vertex:
/// (a) it is acyclic, (b) uncovered vertices have degree 2, blue at most 1,
/// black 0, (c) its components are paths with blue ends covering every
/// uncovered vertex, (d) at most `11n' + n` edges were selected, (e) the last
/// selection is no later than `t5`.
pub fn audit_path_cover(report: &RunReport, log: &[Selection]) -> Result<(), String> {
    if report.outcome != Outcome::Success {
        return Err("not a successful trial".into());
    }
    let b = &report.budgets;
    let n = b.n;
    let Some(Certificate::Cycle { order }) = &report.certificate else {
        return Err("missing cycle certificate".into());
    };
    let builder = Graph::from_edges(n, log.iter().map(|s| s.edge)).map_err(|e| e.to_string())?;
    let mut seen = vec![false; n];
    for &v in order {
        if v >= n || seen[v] {
            return Err(format!("cycle repeats or overflows at {v}"));
        }
        seen[v] = true;
    }
    if order.len() != n {
        return Err(format!("cycle has {} of {n} vertices", order.len()));
    }
    let cycle: Vec<Edge> = (0..n).map(|i| edge(order[i], order[(i + 1) % n])).collect();
    if let Some(e) = cycle.iter().find(|e| !builder.has_edge(e.0, e.1)) {
        return Err(format!("cycle edge {e:?} was never selected"));
    }

    let zones = zones_from_log(log, b);
    let ep: Vec<Edge> = cycle
        .iter()
        .copied()
        .filter(|&(u, v)| zones[u] == Role::Uncovered || zones[v] == Role::Uncovered)
        .collect();
    let mut adj = vec![Vec::new(); n];
    for &(u, v) in &ep {
        adj[u].push(v);
        adj[v].push(u);
    }
    for v in 0..n {
        let d = adj[v].len();
        let ok = match zones[v] {
            Role::Uncovered => d == 2,
            Role::Blue => d <= 1,
            Role::Black => d == 0,
        };
        if !ok {
            return Err(format!(
                "(b) vertex {v} ({:?}) has E_P degree {d}",
                zones[v]
            ));
        }
    }
    // Walk every component from a degree-1 end.
    let mut visited = vec![false; n];
    for s in (0..n).filter(|&v| adj[v].len() == 1) {
        if visited[s] {
            continue;
        }
        let (mut prev, mut cur) = (usize::MAX, s);
        visited[s] = true;
        while let Some(&w) = adj[cur].iter().find(|&&w| w != prev) {
            visited[w] = true;
            prev = cur;
            cur = w;
        }
        if zones[s] != Role::Blue || zones[cur] != Role::Blue {
            return Err(format!("(c) path {s}..{cur} does not end in blue"));
        }
    }
    if let Some(v) = (0..n).find(|&v| !adj[v].is_empty() && !visited[v]) {
        return Err(format!("(a) E_P has a cycle through {v}"));
    }
    if let Some(v) = (0..n).find(|&v| zones[v] == Role::Uncovered && !visited[v]) {
        return Err(format!("(c) uncovered vertex {v} is not on a path"));
    }
    let bound = 11 * b.n_prime + n;
    if log.len() > bound {
        return Err(format!("(d) {} edges selected, bound {bound}", log.len()));
    }
    let last = log.last().map_or(0, |s| s.round);
    if last > b.t5 {
        return Err(format!(
            "(e) last selection at round {last} > t5 = {}",
            b.t5
        ));
    }
    Ok(())
}

/// The uncovered vertex set of `zones` as a sorted set.
pub fn uncovered(zones: &[Role]) -> BTreeSet<usize> {
    (0..zones.len())
        .filter(|&v| zones[v] == Role::Uncovered)
        .collect()
}
