//! Each phase driven by a hand-written script of presented pairs.

use semirandom_ham::budgets::Budgets;
use semirandom_ham::ham::{
    assemble_paths, phase1, phase1_select, phase2, phase3, phase4, phase5, BluePool, FailureCause,
    PathSystem, PhaseError, RewireState, Zone, Zones,
};
use semirandom_ham::{Edge, ProcessState, SamplingMode};

const N: usize = 20;

/// Budgets for a 20-vertex script with the given window lengths.
fn budgets(windows: [u64; 5]) -> Budgets {
    let mut b = Budgets::hamilton(1000, 1, 1.0).unwrap();
    b.n = N;
    b.n_prime = 6;
    let mut t = 0;
    for (i, w) in windows.iter().enumerate() {
        t += w;
        match i {
            0 => b.t1 = t,
            1 => b.t2 = t,
            2 => b.t3 = t,
            3 => b.t4 = t,
            _ => b.t5 = t,
        }
    }
    b.target_phase1_edges = 3;
    b.blue_threshold = 0.0;
    b.path_cap = 10.0;
    b.end_cap = 10.0;
    b.long_path_threshold = 10.0;
    b.fanout_required = 2;
    b
}

fn script(rounds: &[Edge]) -> ProcessState {
    ProcessState::scripted(N, 1, SamplingMode::Missing, rounds.iter().map(|&e| vec![e])).unwrap()
}

/// Uncovered `0..8`, blue `10..16`, black elsewhere.
fn zones() -> Zones {
    Zones::new(
        (0..N)
            .map(|v| match v {
                0..=7 => Zone::Uncovered,
                10..=15 => Zone::Blue,
                _ => Zone::Black,
            })
            .collect(),
    )
}

#[test]
fn phase1_ignores_pairs_outside_the_seed_range() {
    let b = budgets([4, 0, 0, 0, 0]);
    let mut st = script(&[(6, 7), (0, 10), (12, 13), (5, 6)]);
    let err = phase1_select(&mut st, &b).unwrap_err();
    assert_eq!(
        err,
        PhaseError::Failure(FailureCause::Phase1Edges {
            selected: 0,
            required: 3
        })
    );
    assert!(st.selected_log().is_empty());
}

#[test]
fn phase1_stops_exactly_at_its_target() {
    let b = budgets([6, 0, 0, 0, 0]);
    let mut st = script(&[(0, 1), (1, 2), (7, 8), (2, 3), (3, 4), (4, 5)]);
    let seed = phase1_select(&mut st, &b).unwrap();
    assert_eq!(seed.graph.edge_count(), 3);
    let rounds: Vec<u64> = st.selected_log().iter().map(|s| s.round).collect();
    assert_eq!(rounds, vec![1, 2, 4]);
    assert_eq!(st.round(), 6);
}

#[test]
fn phase1_blue_test_uses_a_strict_threshold() {
    // A triangle has an empty strong 4-core, hence no blue vertices.
    let mut b = budgets([3, 0, 0, 0, 0]);
    let mut st = script(&[(0, 1), (1, 2), (0, 2)]);
    let err = phase1(&mut st, &b).unwrap_err();
    assert!(matches!(
        err,
        PhaseError::Failure(FailureCause::Phase1Blue { blue: 0, .. })
    ));
    b.blue_threshold = -1.0;
    let mut st = script(&[(0, 1), (1, 2), (0, 2)]);
    assert!(phase1(&mut st, &b).is_ok());
}

#[test]
fn phase2_builds_paths_and_refuses_cycles() {
    let b = budgets([0, 5, 0, 0, 0]);
    let z = zones();
    // 0-2 would close the path 0-1-2; 1-3 would give 1 degree 3; 0-10 leaves U.
    let mut st = script(&[(0, 1), (1, 2), (0, 2), (0, 10), (1, 3)]);
    let ps = phase2(&mut st, &b, &z).unwrap();
    assert_eq!(ps.e2, vec![(0, 1), (1, 2)]);
    assert!(ps.paths.contains(&vec![0, 1, 2]));
    // The other uncovered vertices are paths of length 0.
    assert_eq!(ps.paths.len(), 1 + 5);
    assert_eq!(ps.end_multiplicity(0), 1);
    assert_eq!(ps.end_multiplicity(1), 0);
    assert_eq!(ps.end_multiplicity(3), 2);
}

#[test]
fn phase2_stops_growing_long_paths() {
    let mut b = budgets([0, 3, 0, 0, 0]);
    b.long_path_threshold = 2.0;
    let z = zones();
    let mut st = script(&[(0, 1), (1, 2), (2, 3)]);
    let ps = phase2(&mut st, &b, &z).unwrap();
    assert_eq!(ps.e2, vec![(0, 1), (1, 2)]);
}

#[test]
fn phase2_fails_with_too_many_paths() {
    let mut b = budgets([0, 1, 0, 0, 0]);
    b.path_cap = 7.0;
    let mut st = script(&[(8, 9)]);
    let err = phase2(&mut st, &b, &zones()).unwrap_err();
    assert_eq!(
        err,
        PhaseError::Failure(FailureCause::Phase2TooManyPaths { paths: 8, cap: 7.0 })
    );
}

#[test]
fn phase3_makes_a_double_end_vertex_interior() {
    let b = budgets([0, 0, 3, 0, 0]);
    let z = Zones::new(
        (0..N)
            .map(|v| {
                if v < 3 {
                    Zone::Blue
                } else if v == 3 {
                    Zone::Uncovered
                } else {
                    Zone::Black
                }
            })
            .collect(),
    );
    let mut ps = PathSystem::from_phase2(&z, Vec::new());
    let mut pool = BluePool::new(&z);
    // 3-4 leads into the core and is skipped.
    let mut st = script(&[(3, 0), (3, 4), (1, 3)]);
    phase3(&mut st, &b, &z, &mut ps, &mut pool).unwrap();
    assert_eq!(ps.e3, vec![(0, 3), (1, 3)]);
    assert_eq!(ps.paths, vec![vec![0, 3, 1]]);
    assert_eq!(ps.end_size(), 0);
    assert!(!pool.contains(0) && !pool.contains(1) && pool.contains(2));
}

#[test]
fn phase3_end_cap_is_not_strict() {
    // 8 isolated uncovered vertices give 16 End copies; one is matched.
    let run = |cap: f64| {
        let mut b = budgets([0, 0, 1, 0, 0]);
        b.end_cap = cap;
        let z = zones();
        let mut ps = PathSystem::from_phase2(&z, Vec::new());
        let mut pool = BluePool::new(&z);
        let mut st = script(&[(0, 10)]);
        phase3(&mut st, &b, &z, &mut ps, &mut pool)
    };
    assert!(run(15.0).is_ok());
    assert_eq!(
        run(14.5).unwrap_err(),
        PhaseError::Failure(FailureCause::Phase3EndTooLarge { end: 15, cap: 14.5 })
    );
}

/// Paths `10-0-1-2-11`, `12-3-4` (End at 4) and `13-5-6-7-14` after Phase 3,
/// with blue 15 still unused.
fn rerouting_setup() -> (Zones, PathSystem, BluePool) {
    let z = zones();
    let mut ps = PathSystem::from_phase2(&z, vec![(0, 1), (1, 2), (3, 4), (5, 6), (6, 7)]);
    let mut pool = BluePool::new(&z);
    for (end, w) in [(0, 10), (2, 11), (3, 12), (5, 13), (7, 14)] {
        ps.consume_end(end);
        pool.take(w);
        ps.e3.push((end.min(w), end.max(w)));
    }
    ps.rederive(&z);
    assert_eq!(ps.end_entries(), vec![(4, 1)]);
    (z, ps, pool)
}

#[test]
fn phase4_collects_exactly_the_required_links() {
    let b = budgets([0, 0, 0, 6, 0]);
    let (_, ps, _) = rerouting_setup();
    let mut rw = RewireState::new(&ps);
    assert_eq!(rw.claimable_count(), 2);
    // 0 and 10 sit at positions 1 and 0; 2 is on a path already claimed by 1.
    let mut st = script(&[(4, 0), (4, 10), (1, 4), (2, 4), (4, 6), (4, 7)]);
    phase4(&mut st, &b, &ps, &mut rw).unwrap();
    assert_eq!(rw.e4, vec![(1, 4), (4, 6)]);
    assert_eq!(rw.copies.len(), 1);
    let claimed: Vec<usize> = rw.copies[0].claims.iter().map(|c| c.path).collect();
    assert_eq!(claimed.len(), 2);
    assert_ne!(claimed[0], claimed[1]);
    assert_eq!(rw.claimable_count(), 0);
    assert_eq!(st.selected_log().len(), b.fanout_required);
}

#[test]
fn phase4_reports_the_deficient_copy() {
    let b = budgets([0, 0, 0, 2, 0]);
    let (_, ps, _) = rerouting_setup();
    let mut rw = RewireState::new(&ps);
    let mut st = script(&[(1, 4), (0, 4)]);
    let err = phase4(&mut st, &b, &ps, &mut rw).unwrap_err();
    assert_eq!(
        err,
        PhaseError::Failure(FailureCause::Phase4Fanout {
            vertex: 4,
            claims: 1,
            required: 2,
            deficient_copies: 1,
        })
    );
}

#[test]
fn phase5_reroutes_through_a_claimed_path() {
    let b = budgets([0, 0, 0, 2, 2]);
    let (z, ps, mut pool) = rerouting_setup();
    let mut rw = RewireState::new(&ps);
    // Round 3 offers a blue vertex next to an unclaimed vertex; round 4
    // joins the predecessor 0 of the claimed hit 1 to the free blue 15.
    let mut st = script(&[(1, 4), (4, 6), (3, 15), (0, 15)]);
    phase4(&mut st, &b, &ps, &mut rw).unwrap();
    phase5(&mut st, &b, &mut rw, &mut pool).unwrap();
    assert_eq!(rw.unresolved(), 0);
    assert_eq!(rw.e_minus, vec![(0, 1)]);
    assert!(rw.e_plus.contains(&(0, 15)) && rw.e_plus.contains(&(1, 4)));
    assert!(!pool.contains(15));
    let mut paths = assemble_paths(&ps, &rw, &z).unwrap();
    for p in &mut paths {
        if p[0] > p[p.len() - 1] {
            p.reverse();
        }
    }
    paths.sort();
    assert_eq!(
        paths,
        vec![
            vec![10, 0, 15],
            vec![11, 2, 1, 4, 3, 12],
            vec![13, 5, 6, 7, 14]
        ]
    );
}

#[test]
fn phase5_fails_without_a_free_blue_vertex() {
    let b = budgets([0, 0, 0, 2, 1]);
    let (_, ps, mut pool) = rerouting_setup();
    pool.take(15);
    let mut rw = RewireState::new(&ps);
    let mut st = script(&[(1, 4), (4, 6), (0, 15)]);
    phase4(&mut st, &b, &ps, &mut rw).unwrap();
    let err = phase5(&mut st, &b, &mut rw, &mut pool).unwrap_err();
    assert_eq!(
        err,
        PhaseError::Failure(FailureCause::Phase5Unresolved { unresolved: 1 })
    );
}
