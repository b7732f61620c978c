use dforest_core::testkit::{fixture, random_digraph, random_edge_ops, GraphKind};
use dforest_core::{build_bottomup, build_topdown, decompose_for_k, MaintainableIndex, UpdateOp};

fn check(ix: &MaintainableIndex, step: usize) {
    let fresh = build_bottomup(ix.graph());
    assert_eq!(ix.forest().trees, fresh.trees, "diverged after op {step}");
    for (k, c) in ix.levels().iter().enumerate() {
        assert_eq!(*c, decompose_for_k(ix.graph(), k), "levels of tree {k} after op {step}");
    }
}

#[test]
fn thousand_random_edge_ops_match_rebuild() {
    let g = random_digraph(GraphKind::Uniform, 100, 0.05, 3).unwrap();
    let ops = random_edge_ops(&g, 1000, 3);
    let mut ix = MaintainableIndex::new(g);
    let mut patched = 0;
    for (i, op) in ops.iter().enumerate() {
        let r = ix.apply(op).unwrap();
        assert!(r.applied);
        patched += r.patched;
        check(&ix, i);
    }
    // the in-place path should carry part of the load
    assert!(patched > 0);
}

#[test]
fn power_law_stream_matches_rebuild() {
    let g = random_digraph(GraphKind::PowerLaw, 150, 3.0, 11).unwrap();
    let ops = random_edge_ops(&g, 400, 8);
    let mut ix = MaintainableIndex::new(g);
    for (i, op) in ops.iter().enumerate() {
        ix.apply(op).unwrap();
        check(&ix, i);
    }
}

#[test]
fn dense_small_graphs_with_vertex_churn() {
    for seed in 0..40u64 {
        let g = random_digraph(GraphKind::Uniform, 12, 0.35, seed).unwrap();
        let mut ix = MaintainableIndex::new(g.clone());
        for (i, op) in random_edge_ops(&g, 60, seed).iter().enumerate() {
            ix.apply(op).unwrap();
            check(&ix, i);
            if i % 15 == 14 {
                let victim = ix.graph().label((i % ix.graph().n()) as u32).to_string();
                ix.apply(&UpdateOp::RemoveVertex(victim.clone())).unwrap();
                check(&ix, i);
                ix.apply(&UpdateOp::AddVertex(victim.clone())).unwrap();
                check(&ix, i);
                // later deletes of the victim's old edges become no-ops
            }
        }
        assert_eq!(ix.forest().trees, build_topdown(ix.graph()).trees);
    }
}

#[test]
fn unchanged_trees_are_untouched() {
    let mut ix = MaintainableIndex::new(fixture("F3"));
    let before = ix.forest().trees.clone();
    let r = ix.apply(&UpdateOp::InsertEdge("0".into(), "p".into())).unwrap();
    assert_eq!(r.changed, vec![0, 1]);
    for k in 2..before.len() {
        assert_eq!(ix.forest().trees[k].nodes(), before[k].nodes());
    }
}
