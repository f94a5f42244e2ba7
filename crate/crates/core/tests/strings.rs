use lrgraph::analyze::verify_structure;
use lrgraph::refine::is_long_refinement;
use lrgraph::strings::{construct, extract_string, parse, realize, Family, RealizeError};
use lrgraph::DegreeSet;

#[test]
fn every_family_member_realizes_and_round_trips() {
    for f in Family::ALL {
        for k in 0..=5 {
            let s = f.expand(k);
            let r = realize(&s).unwrap_or_else(|e| panic!("{f} k={k} {s}: {e}"));
            let g = &r.graph;
            assert_eq!(g.n(), s.order());
            assert_eq!(g.n().is_multiple_of(2), f.is_even(), "{f} k={k}");
            assert_eq!(g.degree_set(), DegreeSet::new(&[2, 3]));
            let report = verify_structure(g);
            assert!(report.all_passed(), "{f} k={k}\n{}", report.render_table());
            assert_eq!(extract_string(g).unwrap(), s, "{f} k={k}");
        }
        for s in f.extras() {
            let r = realize(&s).unwrap_or_else(|e| panic!("{s}: {e}"));
            assert_eq!(extract_string(&r.graph).unwrap(), s);
        }
    }
}

#[test]
fn family_orders() {
    for k in 0..6 {
        assert_eq!(Family::Even2.order(k), 6 * k + 14);
        assert_eq!(Family::Even3.order(k), 6 * k + 16);
        assert_eq!(Family::Even4.order(k), 6 * k + 16);
        assert_eq!(Family::Even5.order(k), 18 * k + 18);
        assert_eq!(Family::Even6.order(k), 18 * k + 18);
        assert_eq!(Family::Odd2.order(k), 6 * k + 17);
        assert_eq!(Family::Odd3.order(k), 6 * k + 19);
        assert_eq!(Family::Odd4.order(k), 6 * k + 13);
        assert_eq!(Family::Odd5.order(k), 18 * k + 15);
    }
    assert_eq!(Family::Even1.order(0), 12);
    assert_eq!(Family::Odd1.order(0), 13);
}

#[test]
fn strings_outside_the_classification() {
    // three-regular, so refinement stops at once
    let r = construct(&parse("S11XX").unwrap()).unwrap();
    assert_eq!(r.graph.degree_set(), DegreeSet::new(&[3]));
    assert!(!is_long_refinement(&r.graph));
    assert!(matches!(realize(&parse("S11XX").unwrap()), Err(RealizeError::NotLongRefinement { .. })));
    assert!(matches!(realize(&parse("S000XX").unwrap()), Err(RealizeError::NotLongRefinement { .. })));
}

#[test]
fn extract_rejects_non_members() {
    assert!(extract_string(&lrgraph::Graph::complete(4)).is_err());
    assert!(extract_string(&lrgraph::Graph::path(2)).is_err());
}
