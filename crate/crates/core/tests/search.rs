mod common;

use std::collections::BTreeSet;

use common::{brute_automorphisms, brute_force, factorial};
use lrgraph::analyze::verify_structure;
use lrgraph::refine::is_long_refinement;
use lrgraph::search::{enumerate, find_long_refinement, Budget, DegreeFilter, SearchError, SearchSpec};

fn spec(n: usize, max_degree: usize, connected: bool) -> SearchSpec {
    let top = max_degree.min(n - 1);
    SearchSpec::new(n, &(1..=top).collect::<Vec<_>>()).filter(DegreeFilter::MaxDegree).connected(connected)
}

#[test]
fn enumeration_matches_labelled_oracle() {
    for n in 2..=6 {
        for connected in [true, false] {
            let oracle = brute_force(n, 4, connected);
            let found = enumerate(&spec(n, 4, connected)).unwrap();
            let forms: BTreeSet<String> = found.iter().map(|f| f.canonical.0.clone()).collect();
            assert_eq!(forms.len(), found.len(), "duplicates at n = {n}");
            assert_eq!(forms, oracle.classes, "n = {n}, connected = {connected}");
        }
    }
}

#[test]
fn orbit_counting_recovers_labelled_count() {
    for n in 2..=6 {
        let oracle = brute_force(n, 3, false);
        let total: u64 = enumerate(&spec(n, 3, false))
            .unwrap()
            .iter()
            .map(|f| factorial(n) / brute_automorphisms(&f.graph) as u64)
            .sum();
        assert_eq!(total, oracle.labelled, "n = {n}");
    }
}

#[test]
fn no_small_long_refinement_graphs() {
    for n in 2..=9 {
        let top = 4.min(n - 1);
        let s = SearchSpec::new(n, &(1..=top).collect::<Vec<_>>()).filter(DegreeFilter::Subset);
        assert!(find_long_refinement(&s).unwrap().is_empty(), "n = {n}");
    }
}

#[test]
fn search_results_are_valid() {
    assert!(find_long_refinement(&SearchSpec::new(10, &[2, 3])).unwrap().is_empty());
    let mut found = find_long_refinement(&SearchSpec::new(11, &[2, 3])).unwrap();
    assert_eq!(found.len(), 1);
    found.extend(find_long_refinement(&SearchSpec::new(10, &[3, 4])).unwrap());
    assert_eq!(found.len(), 4);
    for f in &found {
        assert!(is_long_refinement(&f.graph));
        assert!(verify_structure(&f.graph).all_passed());
    }
}

#[test]
fn deterministic_across_runs() {
    let s = SearchSpec::new(8, &[2, 3]).filter(DegreeFilter::Subset);
    assert_eq!(enumerate(&s).unwrap(), enumerate(&s).unwrap());
}

#[test]
fn budget_and_validation() {
    assert!(matches!(enumerate(&SearchSpec::new(1, &[1])), Err(SearchError::InvalidSpec(_))));
    assert!(matches!(enumerate(&SearchSpec::new(5, &[5])), Err(SearchError::InvalidSpec(_))));
    let tight = SearchSpec::new(9, &[2, 3]).budget(Budget { max_nodes: Some(10), max_time: None });
    match enumerate(&tight) {
        Err(SearchError::BudgetExceeded { partial, nodes, .. }) => {
            assert!(nodes >= 10);
            assert!(partial.len() <= enumerate(&SearchSpec::new(9, &[2, 3])).unwrap().len());
        }
        other => panic!("expected budget error, got {other:?}"),
    }
}
