mod common;

use common::random_permutation;
use lrgraph::analyze::{verify_structure, CheckStatus};
use lrgraph::families::{table_family, TableFamilySpec};
use lrgraph::strings::{realize, Family};
use lrgraph::Graph;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn pair_phase_matches_the_string() {
    for f in Family::ALL {
        for k in 0..=3 {
            let s = f.expand(k);
            let r = realize(&s).unwrap();
            let report = verify_structure(&r.graph);
            let pp = report.pair_phase.as_ref().unwrap();
            assert_eq!(pp.n_p, s.len(), "{s}");
            assert_eq!((pp.a, pp.b), s.x_positions(), "{s}");
            assert_eq!(pp.ell, (pp.n_p - pp.b).min(pp.a - 1));
            assert_eq!(pp.c, pp.a - pp.ell);
            assert_eq!(pp.singletons.len(), s.singleton_count());
            assert_eq!(pp.p + pp.n_p + 1, r.graph.n());
        }
    }
}

#[test]
fn relabelling_preserves_the_report() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut graphs: Vec<Graph> = Family::ALL.iter().map(|f| realize(&f.expand(2)).unwrap().graph).collect();
    for table in 1..=3 {
        graphs.push(table_family(TableFamilySpec { table, variant: 2, k: 1 }).unwrap());
    }
    for g in graphs {
        let base = verify_structure(&g);
        let h = g.permute(&random_permutation(&mut rng, g.n()));
        let moved = verify_structure(&h);
        assert!(moved.all_passed(), "{}", moved.render_table());
        let (x, y) = (base.pair_phase.unwrap(), moved.pair_phase.unwrap());
        assert_eq!((x.p, x.n_p, x.a, x.b, x.ell, x.t, x.d), (y.p, y.n_p, y.a, y.b, y.ell, y.t, y.d));
    }
}

#[test]
fn short_refinement_graphs_stop_at_check_one() {
    for g in [Graph::cycle(7), Graph::path(6), Graph::complete(4), Graph::star(5)] {
        let r = verify_structure(&g);
        assert_eq!(r.check(1).status, CheckStatus::Fail);
        assert!((2..=10).all(|i| r.check(i).status == CheckStatus::Skipped));
        assert!(r.pair_phase.is_none());
        assert!(r.render_table().contains("FAIL"));
    }
}

#[test]
fn report_serializes() {
    let g = realize(&Family::Even1.expand(0)).unwrap().graph;
    let v = serde_json::to_value(verify_structure(&g)).unwrap();
    let checks = v["checks"].as_array().unwrap();
    assert_eq!(checks.len(), 10);
    assert!(checks.iter().all(|c| c["status"] == "pass" || c["status"] == "vacuous"));
    assert!(v["pair_phase"]["a"].is_u64());
}
