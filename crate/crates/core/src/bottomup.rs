//! Bottom-up builder: `k` runs from `kmax` down to 0 and each `k`-tree is
//! assembled leaf-first with a core-based union-find, reusing the component
//! labels remembered while building the `(k+1)`-tree.

use std::collections::HashMap;

use crate::cuf::CufState;
use crate::decomp::{decompose_for_k, group_by_level, max_k, CoreLevels};
use crate::graph::{DirectedGraph, VertexId};
use crate::index::{DForest, KTree, NodeId};
use crate::topdown::BuildStats;

/// Hook for inspecting builder state at every level boundary.
pub trait LevelObserver {
    fn after_level(&mut self, k: usize, l: usize, tree: &KTree, cuf: &mut CufState, cur: &CoreLevels);
}

impl LevelObserver for () {
    fn after_level(&mut self, _: usize, _: usize, _: &KTree, _: &mut CufState, _: &CoreLevels) {}
}

pub fn build_bottomup(g: &DirectedGraph) -> DForest {
    build_bottomup_observed(g, &mut ()).0
}

pub fn build_bottomup_with_stats(g: &DirectedGraph) -> (DForest, BuildStats) {
    build_bottomup_observed(g, &mut ())
}

pub fn build_bottomup_observed<O: LevelObserver>(
    g: &DirectedGraph,
    observer: &mut O,
) -> (DForest, BuildStats) {
    let mut builder = TreeBuilder::new(g);
    let kmax = max_k(g);
    let mut trees = Vec::with_capacity((kmax + 1).max(0) as usize);
    let mut pre: Option<CoreLevels> = None;
    for k in (0..=kmax).rev() {
        let cur = decompose_for_k(g, k as usize);
        trees.push(builder.build_tree(&cur, pre.as_ref(), observer));
        pre = Some(cur);
    }
    trees.reverse();
    let stats = builder.stats();
    (
        DForest::new(trees, g.labels().to_vec(), g.m() as u64, "bottomup"),
        stats,
    )
}

/// Builds one `k`-tree from its level array alone (no `(k+1)` information).
pub fn build_tree_from_levels(g: &DirectedGraph, cur: &CoreLevels) -> KTree {
    TreeBuilder::new(g).build_tree(cur, None, &mut ())
}

/// Per-graph state shared across the `k` iterations.
pub struct TreeBuilder<'g> {
    g: &'g DirectedGraph,
    cuf: CufState,
    touches: u64,
    /// Node ids already claimed as a child during the current level.
    claimed: Vec<bool>,
    seen: Vec<usize>,
    parentless: Vec<bool>,
}

impl<'g> TreeBuilder<'g> {
    pub fn new(g: &'g DirectedGraph) -> Self {
        TreeBuilder {
            g,
            cuf: CufState::new(g.n()),
            touches: 0,
            claimed: Vec::new(),
            seen: Vec::new(),
            parentless: Vec::new(),
        }
    }

    pub fn stats(&self) -> BuildStats {
        BuildStats {
            edge_touches: self.touches,
            chain_steps: self.cuf.chain_steps,
            cuf_operations: self.cuf.operations,
        }
    }

    /// Builds the `k`-tree for `cur`. `pre` holds the `(k+1)` levels when the
    /// union-find still carries that iteration's groups.
    pub fn build_tree<O: LevelObserver>(
        &mut self,
        cur: &CoreLevels,
        pre: Option<&CoreLevels>,
        observer: &mut O,
    ) -> KTree {
        let k = cur.k;
        let mut tree = KTree::new(k, self.g.n());
        self.parentless.clear();
        self.parentless.push(false);
        let groups = group_by_level(cur);
        for l in (0..groups.len()).rev() {
            self.build_a_level(l, &groups[l], cur, pre, &mut tree);
            observer.after_level(k, l, &tree, &mut self.cuf, cur);
        }
        let root = tree.root();
        for i in 0..self.parentless.len() {
            if self.parentless[i] {
                tree.link(root, NodeId(i as u32));
            }
        }
        tree.canonicalize();
        tree
    }

    fn build_a_level(
        &mut self,
        l: usize,
        level: &[VertexId],
        cur: &CoreLevels,
        pre: Option<&CoreLevels>,
        tree: &mut KTree,
    ) {
        if level.is_empty() {
            return;
        }
        let g = self.g;
        let lvl = l as i32;

        // Phase 1: subtree roots reachable from this level's vertices.
        self.claimed.clear();
        self.claimed.resize(tree.len(), false);
        self.seen.clear();
        self.seen.resize(tree.len(), usize::MAX);
        let mut adjacent: Vec<Vec<(NodeId, VertexId)>> = vec![Vec::new(); level.len()];
        for (i, &v) in level.iter().enumerate() {
            self.touches += (g.out_degree(v) + g.in_degree(v)) as u64;
            for u in g.undirected_neighbors(v) {
                if cur.get(u) > lvl {
                    let r = self.cuf.find(u);
                    let hook = self.cuf.entry(r).hook;
                    let child = tree
                        .node_of(hook)
                        .unwrap_or_else(|| panic!("hook {hook} of vertex {u} has no tree node"));
                    if self.seen[child.index()] != i {
                        self.seen[child.index()] = i;
                        adjacent[i].push((child, hook));
                    }
                }
            }
        }

        // Phase 2: connectivity among vertices at level >= l.
        let mut quick: Vec<VertexId> = Vec::new();
        let mut batch: Vec<VertexId> = Vec::with_capacity(level.len());
        for &v in level {
            match pre {
                Some(pre) if pre.get(v) == lvl => {
                    self.cuf.quick_reset(v);
                    quick.push(v);
                }
                _ => {
                    self.cuf.make_set(v);
                    batch.push(v);
                }
            }
        }
        self.batch_union(&batch, cur);
        for &v in &quick {
            let group = self.cuf.entry(v).group;
            self.cuf.union(v, group, cur);
        }
        // A remembered group only covers the (k+1,l)-component; deeper
        // subtrees adjacent to a quick-reset vertex may lie outside it.
        for (i, &v) in level.iter().enumerate() {
            if matches!(pre, Some(pre) if pre.get(v) == lvl) {
                for &(_, hook) in &adjacent[i] {
                    self.cuf.union(hook, v, cur);
                }
            }
        }

        // Phase 3: one node per union-find set among this level's vertices.
        let mut by_root: HashMap<VertexId, usize> = HashMap::new();
        let mut sets: Vec<Vec<usize>> = Vec::new();
        for (i, &v) in level.iter().enumerate() {
            let r = self.cuf.find(v);
            let slot = *by_root.entry(r).or_insert_with(|| {
                sets.push(Vec::new());
                sets.len() - 1
            });
            sets[slot].push(i);
        }
        for members in sets {
            let vset: Vec<VertexId> = members.iter().map(|&i| level[i]).collect();
            let p = tree.add_node(lvl, vset.clone());
            self.parentless.push(true);
            for &i in &members {
                for &(c, _) in &adjacent[i] {
                    if !self.claimed[c.index()] {
                        self.claimed[c.index()] = true;
                        self.parentless[c.index()] = false;
                        tree.link(p, c);
                    }
                }
            }
            self.cuf.update(&vset, cur);
        }
    }

    fn batch_union(&mut self, vertices: &[VertexId], cur: &CoreLevels) {
        let g = self.g;
        for &v in vertices {
            self.touches += (g.out_degree(v) + g.in_degree(v)) as u64;
            let lv = cur.get(v);
            for u in g.undirected_neighbors(v) {
                if cur.get(u) >= lv {
                    self.cuf.union(u, v, cur);
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testkit::fixture;
    use crate::topdown::build_topdown;

    #[test]
    fn matches_topdown_on_fixtures() {
        for name in ["F1", "F2", "F3", "F4", "F5", "F7", "F8"] {
            let g = fixture(name);
            assert_eq!(build_bottomup(&g).trees, build_topdown(&g).trees, "{name}");
        }
    }

    #[test]
    fn pendant_chain() {
        let f = build_bottomup(&fixture("F4"));
        let t1 = &f.trees[1];
        assert_eq!(t1.node(NodeId(1)).vset, vec![4]);
        assert_eq!(t1.node(NodeId(2)).vset, vec![0, 1, 2, 3]);
        assert_eq!(t1.node(NodeId(2)).core_num, 3);
    }
}
