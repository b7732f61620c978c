use proptest::prelude::*;

use dforest_core::cuf::CufState;
use dforest_core::decomp::{degeneracy_bound, kl_core_within, CoreLevels};
use dforest_core::format::{from_bytes, to_bytes};
use dforest_core::testkit::{is_degree_feasible, is_strongly_connected, naive_csd, scsd_fixpoint_oracle};
use dforest_core::{
    build_bottomup, build_topdown, decompose_for_k, kl_core, load_edge_list, max_k, online_csd,
    query_scsd, DirectedGraph, VertexId,
};

fn graph() -> impl Strategy<Value = DirectedGraph> {
    (1usize..14).prop_flat_map(|n| {
        prop::collection::vec((0..n as VertexId, 0..n as VertexId), 0..4 * n)
            .prop_map(move |edges| DirectedGraph::from_edges(n, &edges))
    })
}

fn lmax_bound(g: &DirectedGraph) -> usize {
    g.vertices().map(|v| g.out_degree(v)).max().unwrap_or(0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn cores_nest_in_both_thresholds(g in graph()) {
        let kmax = max_k(&g).max(0) as usize;
        for k in 0..=kmax + 1 {
            for l in 0..=lmax_bound(&g) + 1 {
                let core = kl_core(&g, k, l);
                if l > 0 {
                    let wider = kl_core(&g, k, l - 1);
                    prop_assert!(core.iter().all(|v| wider.binary_search(v).is_ok()));
                }
                if k > 0 {
                    let wider = kl_core(&g, k - 1, l);
                    prop_assert!(core.iter().all(|v| wider.binary_search(v).is_ok()));
                }
            }
        }
    }

    #[test]
    fn cores_are_maximal_fixpoints(g in graph(), k in 0usize..4, l in 0usize..4) {
        let core = kl_core(&g, k, l);
        prop_assert!(is_degree_feasible(&g, &core, k, l));
        for v in g.vertices().filter(|v| core.binary_search(v).is_err()) {
            let mut grown = core.clone();
            grown.push(v);
            prop_assert_eq!(kl_core_within(&g, &grown, k, l), core.clone());
        }
    }

    #[test]
    fn levels_agree_with_cores(g in graph()) {
        let kmax = max_k(&g);
        let bound = degeneracy_bound(g.m());
        prop_assert!(kmax as f64 <= bound + 1e-9 || g.m() == 0);
        for k in 0..=(kmax + 1).max(0) as usize {
            let levels: CoreLevels = decompose_for_k(&g, k);
            if g.m() > 0 {
                prop_assert!(levels.lmax as f64 <= bound + 1e-9);
            }
            for l in 0..=lmax_bound(&g) + 1 {
                let core = kl_core(&g, k, l);
                for v in g.vertices() {
                    prop_assert_eq!(levels.get(v) >= l as i32, core.binary_search(&v).is_ok());
                }
            }
        }
    }

    #[test]
    fn index_answers_match_peeling(g in graph()) {
        let f = build_bottomup(&g);
        prop_assert_eq!(&f.trees, &build_topdown(&g).trees);
        f.check_semantics(&g).map_err(TestCaseError::fail)?;
        prop_assert!(f.total_entries() <= g.n() + g.m());
        for k in 0..f.trees.len() {
            for l in 0..=lmax_bound(&g) {
                for q in g.vertices() {
                    let r = f.query_csd(q, k, l).unwrap();
                    prop_assert_eq!(r.sorted(), naive_csd(&g, q, k, l));
                    if !r.is_empty() {
                        prop_assert!(r.nodes_visited <= r.vertices.len() + 1);
                    }
                }
            }
        }
        let bytes = to_bytes(&f).unwrap();
        prop_assert_eq!(to_bytes(&from_bytes(&bytes).unwrap()).unwrap(), bytes);
    }

    #[test]
    fn scsd_answers_are_strong_feasible_fixpoints(g in graph(), k in 0usize..3, l in 0usize..3) {
        let f = build_bottomup(&g);
        for q in g.vertices() {
            let r = query_scsd(&g, &f, q, k, l).unwrap().sorted();
            prop_assert_eq!(&r, &scsd_fixpoint_oracle(&g, q, k, l));
            if !r.is_empty() {
                prop_assert!(r.binary_search(&q).is_ok());
                prop_assert!(is_strongly_connected(&g, &r));
                prop_assert!(is_degree_feasible(&g, &r, k, l));
                let csd = online_csd(&g, q, k, l);
                prop_assert!(r.iter().all(|v| csd.binary_search(v).is_ok()));
                // one more round changes nothing
                let sub = g.induced_subgraph(&r).unwrap();
                let again = kl_core(&sub, k, l);
                prop_assert_eq!(again.len(), r.len());
            }
        }
    }

    #[test]
    fn edge_list_round_trip(lines in prop::collection::vec(("[a-e]{1,2}", "[a-e]{1,2}"), 0..30)) {
        let text: String = lines.iter().map(|(u, v)| format!("{u} {v}\n")).collect();
        let (g, report) = load_edge_list(text.as_bytes()).unwrap();
        prop_assert_eq!(report.lines, lines.len());
        prop_assert_eq!(g.m() + report.duplicates + report.self_loops, lines.len());
        let mut out = Vec::new();
        g.write_edge_list(&mut out).unwrap();
        let (h, _) = load_edge_list(out.as_slice()).unwrap();
        prop_assert_eq!(h.canonical_edges(), g.canonical_edges());
        let ins: usize = g.vertices().map(|v| g.in_degree(v)).sum();
        let outs: usize = g.vertices().map(|v| g.out_degree(v)).sum();
        prop_assert_eq!((ins, outs), (g.m(), g.m()));
        for (u, v) in g.edges() {
            prop_assert!(g.in_neighbors(v).contains(&u));
        }
    }

    #[test]
    fn cuf_partitions_match_naive_union_find(
        n in 1usize..40,
        ops in prop::collection::vec((any::<bool>(), 0usize..40, 0usize..40), 0..200),
    ) {
        let flat = CoreLevels { k: 0, maxl: vec![0; n], lmax: 0 };
        let mut cuf = CufState::new(n);
        let mut naive: Vec<usize> = (0..n).collect();
        for (is_union, a, b) in ops {
            let (a, b) = (a % n, b % n);
            if is_union {
                cuf.union(a as VertexId, b as VertexId, &flat);
                let (ra, rb) = (naive[a], naive[b]);
                for x in naive.iter_mut() {
                    if *x == rb {
                        *x = ra;
                    }
                }
            } else {
                cuf.find(a as VertexId);
            }
        }
        for a in 0..n {
            for b in 0..n {
                prop_assert_eq!(
                    cuf.find(a as VertexId) == cuf.find(b as VertexId),
                    naive[a] == naive[b]
                );
            }
        }
        prop_assert!(cuf.chain_steps <= 5 * cuf.operations.max(1));
    }
}
