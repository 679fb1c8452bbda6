use super::*;
use crate::generate::{erdos_renyi, grid2d, path, random_tree};
use crate::matrix_io::{random_permutation, Permutation, SparsePattern};
use crate::oracle::{fill_in_count, EliminationGraph};
use crate::quotient::{Marker, NodeState};
use crate::testutil::grid3;
use crate::verify::{MirrorChecks, OracleMirror};
use proptest::prelude::*;

fn v(i: usize) -> usize {
    i - 1
}

fn commit(g: &QuotientGraph, p: usize, m: &mut Marker) -> Vec<usize> {
    let mut res = g.reserve_pool(g.neighborhood_upper_bound(p)).unwrap();
    g.eliminate_pivot(p, &mut res, m).unwrap()
}

/// Grid after eliminating 5, 2 and 9, with element 7 just formed. Plain
/// eliminations only (no merging), with degrees kept exact.
fn partly_eliminated_grid() -> (QuotientGraph, Vec<usize>) {
    let g = QuotientGraph::from_pattern(&grid3(), 1.5).unwrap();
    let mut oracle = EliminationGraph::new(&grid3());
    let mut m = Marker::new(9);
    for x in [5, 2, 9] {
        commit(&g, v(x), &mut m);
        oracle.eliminate_vertex(v(x)).unwrap();
    }
    for u in g.live_variables() {
        g.set_degree(u, oracle.degree(u));
    }
    let lp = commit(&g, v(7), &mut m);
    (g, lp)
}

#[test]
fn set_differences_on_partly_eliminated_grid() {
    let (g, lp) = partly_eliminated_grid();
    let mut sorted = lp.clone();
    sorted.sort();
    assert_eq!(sorted, vec![v(4), v(8)]);
    let mut ws = DegreeWorkspace::new(9);
    let mut diffs = compute_set_difference_sizes(&g, v(7), &lp, &mut ws);
    diffs.sort();
    assert_eq!(diffs, vec![(v(2), 3), (v(9), 1)]);
    assert!(compute_set_difference_sizes(&g, v(7), &[], &mut ws).is_empty());
}

#[test]
fn degree_terms_on_partly_eliminated_grid() {
    let (g, lp) = partly_eliminated_grid();
    let mut ws = DegreeWorkspace::new(9);
    let mut m = Marker::new(9);
    let done = update_approximate_degrees(&g, v(7), lp, &mut ws, &mut m, 3, true);
    let u8 = done.updates.iter().find(|u| u.v == v(8)).unwrap();
    assert_eq!(u8.terms[2], 5);
    assert_eq!(u8.terms[0], 4);
    assert_eq!(u8.degree, 4);

    let mut oracle = EliminationGraph::new(&grid3());
    for x in [5, 2, 9, 7] {
        oracle.eliminate_vertex(v(x)).unwrap();
    }
    assert_eq!(oracle.neighbors(v(8)), &[v(1), v(3), v(4), v(6)]);
    assert_eq!(g.degree(v(8)), oracle.degree(v(8)));
}

#[test]
fn covered_element_has_zero_difference_and_is_absorbed() {
    // element 0 has clique {1, 2}; pivot 3 is adjacent to 1 and 2 only
    let p = SparsePattern::from_edges(5, &[(0, 1), (0, 2), (3, 1), (3, 2), (1, 4)]).unwrap();
    let g = QuotientGraph::from_pattern(&p, 1.5).unwrap();
    let mut m = Marker::new(5);
    commit(&g, 0, &mut m);
    let lp = commit(&g, 3, &mut m);
    let mut ws = DegreeWorkspace::new(5);
    assert_eq!(compute_set_difference_sizes(&g, 3, &lp, &mut ws), vec![(0, 0)]);
    update_approximate_degrees(&g, 3, lp, &mut ws, &mut m, 1, true);
    assert_eq!(g.state(0), NodeState::Absorbed);
    assert_eq!(g.parent(0), Some(3));
}

#[test]
fn only_pivot_connection_is_tight_and_mass_eliminates() {
    // star: leaves touch only the center
    let p = SparsePattern::from_edges(4, &[(0, 1), (0, 2), (0, 3), (2, 3)]).unwrap();
    let g = QuotientGraph::from_pattern(&p, 1.5).unwrap();
    let mut m = Marker::new(4);
    let mut ws = DegreeWorkspace::new(4);
    let lp = commit(&g, 1, &mut m);
    assert_eq!(lp, vec![0]);
    let done = update_approximate_degrees(&g, 1, lp, &mut ws, &mut m, 0, true);
    // 0 still reaches 2 and 3 directly
    assert_eq!(done.updates[0].degree, 2);
    assert!(done.killed.is_empty());

    let lp = commit(&g, 2, &mut m);
    let done = update_approximate_degrees(&g, 2, lp, &mut ws, &mut m, 1, true);
    // 0 and 3 now only see element 2, so both go with it
    assert_eq!(done.chain, vec![2, 0, 3]);
}

#[test]
fn external_degree_of_single_element_neighbor() {
    // after the path center goes, the ends see only the new element
    let g = QuotientGraph::from_pattern(&path(3), 1.5).unwrap();
    let mut m = Marker::new(3);
    let mut ws = DegreeWorkspace::new(3);
    let lp = commit(&g, 1, &mut m);
    let done = update_approximate_degrees(&g, 1, lp, &mut ws, &mut m, 0, true);
    assert_eq!(done.chain, vec![1, 0, 2]);
}

#[test]
fn edgeless_and_paths_have_no_fill() {
    let empty = SparsePattern::from_edges(5, &[]).unwrap();
    let r = sequential_amd(&empty, &AmdOptions::default()).unwrap();
    assert_eq!(r.n(), 5);
    assert_eq!(fill_in_count(&empty, &r.permutation).unwrap(), 0);
    let p5 = path(5);
    let r = sequential_amd(&p5, &AmdOptions::default()).unwrap();
    assert_eq!(fill_in_count(&p5, &r.permutation).unwrap(), 0);
}

/// Minimum fill over all orders: the graph after eliminating a set does not
/// depend on the order, so a subset recursion suffices.
fn brute_force_min_fill(p: &SparsePattern) -> usize {
    let n = p.n();
    let mut best = vec![usize::MAX; 1 << n];
    best[0] = 0;
    for s in 0..(1usize << n) {
        if best[s] == usize::MAX {
            continue;
        }
        let mut g = EliminationGraph::new(p);
        for x in 0..n {
            if s & (1 << x) != 0 {
                g.eliminate_vertex(x).unwrap();
            }
        }
        for x in 0..n {
            if s & (1 << x) == 0 {
                let f = g.clone().eliminate_vertex(x).unwrap();
                let t = s | (1 << x);
                best[t] = best[t].min(best[s] + f);
            }
        }
    }
    best[(1 << n) - 1]
}

#[test]
fn grid_fill_between_optimum_and_natural_order() {
    let p = grid3();
    let r = sequential_amd(&p, &AmdOptions::default()).unwrap();
    let fill = fill_in_count(&p, &r.permutation).unwrap();
    let natural = fill_in_count(&p, &Permutation::identity(9)).unwrap();
    let optimum = brute_force_min_fill(&p);
    assert!(fill <= natural, "{fill} > {natural}");
    assert!(fill >= optimum);
}

#[test]
fn mirror_finds_no_violations() {
    for (i, p) in [grid3(), grid2d(6), erdos_renyi(30, 0.2, 4), random_tree(25, 2)]
        .iter()
        .enumerate()
    {
        for aggressive in [true, false] {
            let opts = AmdOptions {
                aggressive_absorption: aggressive,
                augmentation: 1.5,
            };
            let mut mirror = OracleMirror::new(p, MirrorChecks::default());
            let r = sequential_amd_observed(p, &opts, &mut mirror).unwrap();
            assert!(mirror.is_clean(), "case {i}: {:?}", &mirror.violations()[..1]);
            assert_eq!(r.steps.iter().map(|s| s.eliminated).sum::<usize>(), p.n());
        }
    }
}

#[test]
fn tiny_pool_still_completes_by_collection() {
    let p = grid2d(10);
    let r = sequential_amd(
        &p,
        &AmdOptions {
            aggressive_absorption: true,
            augmentation: 0.0,
        },
    )
    .unwrap();
    assert!(r.garbage_collections > 0);
    let free = sequential_amd(&p, &AmdOptions::default()).unwrap();
    assert_eq!(r.permutation, free.permutation);
}

fn random_graph() -> impl Strategy<Value = SparsePattern> {
    (5usize..40, 0.1f64..0.5, any::<u64>()).prop_map(|(n, prob, seed)| erdos_renyi(n, prob, seed))
}

/// Naive `|L_e \ L_p|` by sets, weighted.
fn naive_differences(g: &QuotientGraph, p: usize, lp: &[usize]) -> Vec<(usize, usize)> {
    let mut elems: Vec<usize> = lp
        .iter()
        .flat_map(|&x| g.e_list(x))
        .filter(|&e| e != p && g.state(e) == NodeState::Element)
        .collect();
    elems.sort();
    elems.dedup();
    elems
        .into_iter()
        .map(|e| {
            let d = g
                .l_list(e)
                .into_iter()
                .filter(|&u| g.is_variable(u) && !lp.contains(&u))
                .map(|u| g.weight(u))
                .sum();
            (e, d)
        })
        .collect()
}

proptest! {
    #[test]
    fn set_differences_match_naive(p in random_graph(), seed in any::<u64>(), poison in any::<u64>()) {
        let order = random_permutation(p.n(), seed);
        let g = QuotientGraph::from_pattern(&p, 6.0).unwrap();
        let mut m = Marker::new(p.n());
        let mut ws = DegreeWorkspace::poisoned(p.n(), poison);
        for &x in order.order() {
            if !g.is_variable(x) {
                continue;
            }
            let lp = commit(&g, x, &mut m);
            let mut got = compute_set_difference_sizes(&g, x, &lp, &mut ws);
            got.sort();
            prop_assert_eq!(got, naive_differences(&g, x, &lp));
        }
    }

    #[test]
    fn poisoned_and_fresh_workspaces_agree(p in random_graph(), poison in any::<u64>()) {
        let run = |mut ws: DegreeWorkspace| {
            let g = QuotientGraph::from_pattern(&p, 6.0).unwrap();
            let mut m = Marker::new(p.n());
            let mut degrees = Vec::new();
            for x in 0..p.n() {
                if !g.is_variable(x) {
                    continue;
                }
                let lp = commit(&g, x, &mut m);
                let done = update_approximate_degrees(&g, x, lp, &mut ws, &mut m, 0, true);
                degrees.push(done.updates);
            }
            degrees
        };
        prop_assert_eq!(run(DegreeWorkspace::new(p.n())), run(DegreeWorkspace::poisoned(p.n(), poison)));
    }

    #[test]
    fn sequential_bounds_hold(p in random_graph()) {
        let mut mirror = OracleMirror::new(&p, MirrorChecks::default());
        sequential_amd_observed(&p, &AmdOptions::default(), &mut mirror).unwrap();
        prop_assert!(mirror.is_clean(), "{:?}", mirror.violations());
    }

    #[test]
    fn trees_order_without_fill(n in 2usize..200, seed in any::<u64>()) {
        let t = random_tree(n, seed);
        let r = sequential_amd(&t, &AmdOptions::default()).unwrap();
        prop_assert_eq!(fill_in_count(&t, &r.permutation).unwrap(), 0);
    }
}
