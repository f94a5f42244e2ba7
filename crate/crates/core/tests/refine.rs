mod common;

use lrgraph::fast::refine_fast;
use lrgraph::graph6::{parse_graph6, write_graph6};
use lrgraph::refine::{
    distinguishing_iteration, is_stable, iteration_number, refine_step, run_colour_refinement, Colouring,
    Distinguishing, RefinementTrace,
};
use lrgraph::Graph;
use proptest::prelude::*;

fn arb_graph(max_n: usize) -> impl Strategy<Value = Graph> {
    (0..=max_n).prop_flat_map(|n| {
        let pairs = n * n.saturating_sub(1) / 2;
        prop::collection::vec(any::<bool>(), pairs).prop_map(move |bits| {
            let mut edges = Vec::new();
            let mut k = 0;
            for u in 0..n {
                for v in u + 1..n {
                    if bits[k] {
                        edges.push((u, v));
                    }
                    k += 1;
                }
            }
            Graph::new(n, &edges).unwrap()
        })
    })
}

fn arb_graph_and_perm(max_n: usize) -> impl Strategy<Value = (Graph, Vec<usize>)> {
    arb_graph(max_n).prop_flat_map(|g| {
        let n = g.n();
        (Just(g), Just((0..n).collect::<Vec<_>>()).prop_shuffle())
    })
}

fn same_sequence(a: &RefinementTrace, b: &RefinementTrace) -> bool {
    a.partitions.len() == b.partitions.len()
        && a.partitions.iter().zip(&b.partitions).all(|(x, y)| x.same_partition(y))
}

/// Reference refinement straight from the definition: new colour is the
/// pair (old colour, sorted multiset of neighbour colours).
fn naive_step(g: &Graph, c: &Colouring) -> Colouring {
    let sigs: Vec<(usize, Vec<usize>)> = (0..g.n())
        .map(|v| {
            let mut m: Vec<usize> = g.neighbours(v).iter().map(|&u| c.colour(u)).collect();
            m.sort_unstable();
            (c.colour(v), m)
        })
        .collect();
    let mut distinct = sigs.clone();
    distinct.sort();
    distinct.dedup();
    Colouring::from_labels(&sigs.iter().map(|s| distinct.binary_search(s).unwrap()).collect::<Vec<_>>())
}

#[test]
fn path_formula() {
    for n in 2..=50 {
        assert_eq!(iteration_number(&Graph::path(n)), (n - 1) / 2, "P_{n}");
    }
}

#[test]
fn regular_graphs_are_stable_immediately() {
    for n in 3..12 {
        assert_eq!(iteration_number(&Graph::cycle(n)), 0);
        assert_eq!(iteration_number(&Graph::complete(n)), 0);
    }
}

#[test]
fn distinguishing_cases() {
    let c6 = Graph::cycle(6);
    let two_triangles = Graph::cycle(3).disjoint_union(&Graph::cycle(3));
    assert_eq!(distinguishing_iteration(&c6, &two_triangles), Distinguishing::Equivalent);
    assert_eq!(distinguishing_iteration(&Graph::path(4), &Graph::star(3)), Distinguishing::Iteration(1));
    assert_eq!(distinguishing_iteration(&Graph::path(3), &Graph::path(4)), Distinguishing::Iteration(0));
    // same degree multiset; neighbour degrees differ
    let split = Graph::cycle(3).disjoint_union(&Graph::path(3));
    assert_eq!(distinguishing_iteration(&Graph::path(6), &split), Distinguishing::Iteration(2));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn graph6_round_trip(g in arb_graph(70)) {
        prop_assert_eq!(parse_graph6(&write_graph6(&g)).unwrap(), g);
    }

    #[test]
    fn complement_is_an_involution(g in arb_graph(30)) {
        let c = g.complement();
        prop_assert_eq!(c.m() + g.m(), g.n() * g.n().saturating_sub(1) / 2);
        prop_assert_eq!(c.complement(), g);
    }

    #[test]
    fn engine_matches_definition(g in arb_graph(24)) {
        let t = run_colour_refinement(&g);
        let mut c = Colouring::monochromatic(g.n());
        for (i, p) in t.partitions.iter().enumerate() {
            prop_assert!(p.same_partition(&c), "iteration {}", i);
            c = naive_step(&g, &c);
        }
        prop_assert!(c.same_partition(t.final_partition()));
        prop_assert!(is_stable(&g, t.final_partition()));
    }

    #[test]
    fn fast_engine_agrees(g in arb_graph(40)) {
        let a = run_colour_refinement(&g);
        let b = refine_fast(&g);
        prop_assert!(same_sequence(&a, &b));
        prop_assert_eq!(a.iteration_number, b.iteration_number);
        prop_assert_eq!(a.splits, b.splits);
    }

    #[test]
    fn partitions_strictly_refine(g in arb_graph(30)) {
        let t = run_colour_refinement(&g);
        for w in t.partitions.windows(2) {
            prop_assert!(w[1].refines(&w[0]));
            prop_assert!(w[1].num_classes() > w[0].num_classes());
        }
        prop_assert!(t.iteration_number <= g.n().saturating_sub(1));
        let last = t.final_partition();
        prop_assert!(refine_step(&g, last).unwrap().same_partition(last));
    }

    #[test]
    fn invariant_under_relabelling((g, p) in arb_graph_and_perm(25)) {
        let h = g.permute(&p);
        let a = run_colour_refinement(&g);
        let b = run_colour_refinement(&h);
        prop_assert_eq!(a.iteration_number, b.iteration_number);
        for (x, y) in a.partitions.iter().zip(&b.partitions) {
            let moved: Vec<usize> = (0..g.n()).map(|v| y.colour(p[v])).collect();
            prop_assert!(x.same_partition(&Colouring::from_labels(&moved)));
        }
        prop_assert_eq!(distinguishing_iteration(&g, &h), Distinguishing::Equivalent);
    }

    #[test]
    fn complement_refines_identically(g in arb_graph(30)) {
        prop_assert!(same_sequence(&run_colour_refinement(&g), &run_colour_refinement(&g.complement())));
    }

    #[test]
    fn distinguishing_is_symmetric(g in arb_graph(12), h in arb_graph(12)) {
        prop_assert_eq!(distinguishing_iteration(&g, &h), distinguishing_iteration(&h, &g));
    }
}
