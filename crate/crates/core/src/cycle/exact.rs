//! Exact Hamilton-cycle searches over subsets.
//!
//! Two independent formulations: [`exhaustive_units`] works on glued units
//! (a forced pair is one unit with two ports) and backs [`super::complete_cycle`]
//! on small inputs; [`exact_hamilton`] works vertex by vertex and serves as
//! the oracle for it.

use super::{CycleCertificate, CycleError, ForcedMatching};
use crate::graph::Graph;

/// Largest vertex count [`exact_hamilton`] accepts.
pub const EXACT_MAX_N: usize = 14;

/// Unit-level Held–Karp. Unit 0 is traversed from its first port to its
/// second; reversing a cycle makes that a free choice.
pub(super) fn exhaustive_units(g: &Graph, m: &ForcedMatching) -> Option<Vec<usize>> {
    let n = g.n();
    if n < 3 {
        return None;
    }
    let mut ports: Vec<[usize; 2]> = Vec::new();
    for v in 0..n {
        match m.partner(v) {
            None => ports.push([v, v]),
            Some(p) if v < p => ports.push([v, p]),
            Some(_) => {}
        }
    }
    let units = ports.len();
    if units < 2 {
        return None;
    }
    assert!(units <= 20, "exhaustive search over {units} units");
    let entry = |j: usize, o: usize| ports[j][o];
    let exit = |j: usize, o: usize| ports[j][1 - o];
    let orientations = |j: usize| if ports[j][0] == ports[j][1] { 1 } else { 2 };
    let state = |j: usize, o: usize| 1u64 << (2 * j + o);

    let full = (1usize << units) - 1;
    let mut dp = vec![0u64; 1 << units];
    dp[1] = state(0, 0);
    for mask in 1..=full {
        let mut states = dp[mask];
        if states == 0 || mask & 1 == 0 {
            continue;
        }
        while states != 0 {
            let bit = states.trailing_zeros() as usize;
            states &= states - 1;
            let (j, o) = (bit / 2, bit % 2);
            let from = exit(j, o);
            for nj in 1..units {
                if mask & (1 << nj) != 0 {
                    continue;
                }
                for no in 0..orientations(nj) {
                    if g.has_edge(from, entry(nj, no)) {
                        dp[mask | (1 << nj)] |= state(nj, no);
                    }
                }
            }
        }
    }

    let home = entry(0, 0);
    let mut last = None;
    'outer: for j in 0..units {
        for o in 0..orientations(j) {
            if j != 0 && dp[full] & state(j, o) != 0 && g.has_edge(exit(j, o), home) {
                last = Some((j, o));
                break 'outer;
            }
        }
    }
    let (mut j, mut o) = last?;
    let mut mask = full;
    let mut rev_units = vec![(j, o)];
    while mask != 1 {
        let prev_mask = mask & !(1 << j);
        let target = entry(j, o);
        let mut found = None;
        let mut states = dp[prev_mask];
        while states != 0 {
            let bit = states.trailing_zeros() as usize;
            states &= states - 1;
            let (pj, po) = (bit / 2, bit % 2);
            if g.has_edge(exit(pj, po), target) {
                found = Some((pj, po));
                break;
            }
        }
        let (pj, po) = found.expect("dp predecessor must exist");
        rev_units.push((pj, po));
        mask = prev_mask;
        j = pj;
        o = po;
    }
    let mut order = Vec::with_capacity(n);
    for &(j, o) in rev_units.iter().rev() {
        order.push(entry(j, o));
        if ports[j][0] != ports[j][1] {
            order.push(exit(j, o));
        }
    }
    Some(order)
}

/// Decides whether `g ∪ m` has a Hamilton cycle through every pair of `m`,
/// by dynamic programming over vertex subsets. Starts at vertex 0; a vertex
/// whose forced partner is still unvisited must step to that partner next.
pub fn exact_hamilton(
    g: &Graph,
    m: &ForcedMatching,
) -> Result<Option<CycleCertificate>, CycleError> {
    let n = g.n();
    if n > EXACT_MAX_N {
        return Err(CycleError::TooLarge {
            n,
            max: EXACT_MAX_N,
        });
    }
    if m.n() != n {
        return Err(CycleError::InvalidMatching(format!(
            "matching is over {} vertices, graph has {n}",
            m.n()
        )));
    }
    if n < 3 {
        return Ok(None);
    }
    let step_ok = |v: usize, u: usize, mask: usize| -> bool {
        if mask & (1 << u) != 0 {
            return false;
        }
        match m.partner(v) {
            Some(p) if mask & (1 << p) == 0 => u == p,
            _ => g.has_edge(v, u),
        }
    };

    let full = (1usize << n) - 1;
    let mut dp = vec![0u16; 1 << n];
    dp[1] = 1;
    for mask in 1..full {
        if mask & 1 == 0 || dp[mask] == 0 {
            continue;
        }
        for v in 0..n {
            if dp[mask] & (1 << v) == 0 {
                continue;
            }
            for u in 0..n {
                if step_ok(v, u, mask) {
                    dp[mask | (1 << u)] |= 1 << u;
                }
            }
        }
    }
    let Some(mut last) = (1..n).find(|&t| dp[full] & (1 << t) != 0 && g.has_edge(t, 0)) else {
        return Ok(None);
    };
    let mut order = vec![last];
    let mut mask = full;
    while mask != 1 {
        let prev = mask & !(1 << last);
        let v = (0..n)
            .find(|&v| dp[prev] & (1 << v) != 0 && step_ok(v, last, prev))
            .expect("dp predecessor must exist");
        order.push(v);
        mask = prev;
        last = v;
    }
    order.reverse();
    Ok(Some(CycleCertificate::new(order)))
}
