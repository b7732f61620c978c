//! Baseline builder: for each `k`, split the (k,0)-core into components and
//! refine every component level by level, re-peeling inside it.

use crate::decomp::{max_k, Scratch};
use crate::graph::{DirectedGraph, VertexId};
use crate::index::{DForest, KTree, NodeId};

/// Work counters reported by the builders.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BuildStats {
    /// Adjacency entries inspected.
    pub edge_touches: u64,
    /// Union-find parent hops (bottom-up builder only).
    pub chain_steps: u64,
    /// Union-find operations (bottom-up builder only).
    pub cuf_operations: u64,
}

pub fn build_topdown(g: &DirectedGraph) -> DForest {
    build_topdown_with_stats(g).0
}

pub fn build_topdown_with_stats(g: &DirectedGraph) -> (DForest, BuildStats) {
    let mut scratch = Scratch::new(g.n());
    let kmax = max_k(g);
    let trees: Vec<KTree> = (0..=kmax)
        .map(|k| build_tree(g, k as usize, &mut scratch))
        .collect();
    let stats = BuildStats {
        edge_touches: scratch.touches,
        ..Default::default()
    };
    (
        DForest::new(trees, g.labels().to_vec(), g.m() as u64, "topdown"),
        stats,
    )
}

/// Builds the canonical `k`-tree top-down.
pub fn build_tree(g: &DirectedGraph, k: usize, scratch: &mut Scratch) -> KTree {
    let n = g.n();
    let mut tree = KTree::new(k, n);
    let root = tree.root();
    let mut deepest: Vec<Option<NodeId>> = vec![None; n];
    let all: Vec<VertexId> = g.vertices().collect();
    let core = scratch.peel(g, &all, k, 0);

    let mut active: Vec<(NodeId, Vec<VertexId>)> = Vec::new();
    for comp in scratch.components(g, &core) {
        let p = tree.add_node(0, Vec::new());
        tree.link(root, p);
        for &v in &comp {
            deepest[v as usize] = Some(p);
        }
        active.push((p, comp));
    }

    let mut l = 1usize;
    while !active.is_empty() {
        let mut next = Vec::with_capacity(active.len());
        for (p, set) in active {
            let core = scratch.peel(g, &set, k, l);
            if core.is_empty() {
                continue;
            }
            if core.len() == set.len() {
                // same component one level deeper: no new node, the node moves down
                tree.node_mut(p).core_num = l as i32;
                next.push((p, set));
                continue;
            }
            for comp in scratch.components(g, &core) {
                let c = tree.add_node(l as i32, Vec::new());
                tree.link(p, c);
                for &v in &comp {
                    deepest[v as usize] = Some(c);
                }
                next.push((c, comp));
            }
        }
        active = next;
        l += 1;
    }

    for v in g.vertices() {
        if let Some(p) = deepest[v as usize] {
            tree.node_mut(p).vset.push(v);
        }
    }
    tree.canonicalize();
    tree
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testkit::fixture;

    #[test]
    fn cycle_forest() {
        let f = build_topdown(&fixture("F1"));
        assert_eq!(f.trees.len(), 2);
        let t1 = &f.trees[1];
        assert_eq!(t1.len(), 2);
        assert_eq!(t1.node(NodeId(1)).core_num, 1);
        assert_eq!(t1.node(NodeId(1)).vset, vec![0, 1, 2]);
    }

    #[test]
    fn pendant_chain_skips_level_two() {
        let f = build_topdown(&fixture("F4"));
        let t1 = &f.trees[1];
        assert_eq!(t1.len(), 3);
        let a = t1.node(NodeId(1));
        let b = t1.node(NodeId(2));
        assert_eq!((a.core_num, a.vset.clone()), (1, vec![4]));
        assert_eq!((b.core_num, b.vset.clone()), (3, vec![0, 1, 2, 3]));
        assert_eq!(b.parent, Some(NodeId(1)));
        let r = f.query_csd(0, 1, 2).unwrap();
        assert_eq!(r.sorted(), vec![0, 1, 2, 3]);
    }

    #[test]
    fn empty_graph_has_no_trees() {
        let f = build_topdown(&DirectedGraph::default());
        assert_eq!(f.kmax(), -1);
    }
}
