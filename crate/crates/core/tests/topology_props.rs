mod common;

use common::{corner_oracle, random_decl};
use ncphi4::graph::{catalog, parse_decl, serialize_decl, EdgeDecl};
use ncphi4::rosette::{contract_to_rosette, enumerate_spanning_trees};
use ncphi4::topology::topology_report;
use ncphi4::RibbonGraph;
use proptest::prelude::*;

#[test]
fn oracle_matches_catalog() {
    for entry in catalog() {
        let rep = topology_report(&entry.graph).unwrap();
        let (f, g, b) = corner_oracle(&entry.graph.to_decl());
        assert_eq!((rep.faces, rep.genus, rep.broken), (f, g, b), "{}", entry.name);
    }
}

fn graph_params() -> impl Strategy<Value = (usize, usize, u64)> {
    (1usize..=4)
        .prop_flat_map(|n| {
            let max_ext = 4 * n - 2 * (n - 1);
            (Just(n), (0..=max_ext / 2).prop_map(|h| 2 * h), any::<u64>())
        })
        .prop_filter("φ⁴ line count", |(n, e, _)| 4 * n - e >= 2 * (n - 1))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn trace_agrees_with_oracle((n, n_ext, seed) in graph_params()) {
        let decl = random_decl(n, n_ext, seed);
        let g = RibbonGraph::from_decl(&decl).unwrap();
        let rep = topology_report(&g).unwrap();
        let (f, genus, b) = corner_oracle(&decl);
        prop_assert_eq!((rep.faces, rep.genus, rep.broken), (f, genus, b));
        let chi = rep.n as i64 - rep.lines as i64 + rep.faces as i64;
        prop_assert_eq!(chi, 2 - 2 * rep.genus as i64);
    }

    #[test]
    fn rosettes_keep_topology((n, n_ext, seed) in graph_params()) {
        let g = RibbonGraph::from_decl(&random_decl(n, n_ext, seed)).unwrap();
        let rep = topology_report(&g).unwrap();
        for t in enumerate_spanning_trees(&g) {
            let r = contract_to_rosette(&g, &t);
            let rr = r.topology().unwrap();
            prop_assert_eq!((rr.faces, rr.genus, rr.broken), (rep.faces, rep.genus, rep.broken));
            if rep.genus == 0 {
                prop_assert!(r.is_crossing_free());
            }
        }
    }

    #[test]
    fn text_round_trip((n, n_ext, seed) in graph_params()) {
        let decl = random_decl(n, n_ext, seed);
        let text = serialize_decl(&decl);
        prop_assert_eq!(&parse_decl(&text).unwrap(), &decl);
        let g = RibbonGraph::from_decl(&decl).unwrap();
        let back = RibbonGraph::from_decl(&parse_decl(&serialize_decl(&g.to_decl())).unwrap()).unwrap();
        prop_assert_eq!(topology_report(&back).unwrap(), topology_report(&g).unwrap());
    }

    #[test]
    fn relabeling_keeps_topology((n, n_ext, seed) in graph_params(), salt in "[a-z]{1,4}") {
        let decl = random_decl(n, n_ext, seed);
        let text = serialize_decl(&decl).replace(" h", &format!(" {salt}H")).replace("vertex v", &format!("vertex {salt}V"));
        let a = topology_report(&RibbonGraph::from_decl(&decl).unwrap()).unwrap();
        let b = topology_report(&RibbonGraph::from_decl(&parse_decl(&text).unwrap()).unwrap()).unwrap();
        prop_assert_eq!((a.faces, a.genus, a.broken), (b.faces, b.genus, b.broken));
    }

    #[test]
    fn fusing_legs_loses_at_most_one_face(n in 1usize..=4, seed in any::<u64>()) {
        let mut decl = random_decl(n, 2, seed);
        let f = topology_report(&RibbonGraph::from_decl(&decl).unwrap()).unwrap().faces;
        let legs: Vec<String> = decl.externals.drain(..).map(|x| x.half_edge).collect();
        decl.edges.push(EdgeDecl { id: "fused".into(), ends: [legs[0].clone(), legs[1].clone()] });
        let fused = topology_report(&RibbonGraph::from_decl(&decl).unwrap()).unwrap().faces;
        prop_assert!(fused + 1 >= f, "F {} -> {}", f, fused);
    }
}
