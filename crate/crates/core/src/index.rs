//! The D-Forest: one containment tree per `k`, plus per-tree vertex→node maps.
//!
//! In the `k`-tree every non-root node holds the vertices whose maximum `l`
//! (for that `k`) equals the node's `core_num`, and the subtree under a node
//! spans exactly one weakly connected component of the (k, core_num)-core.
//! The root is a sentinel with `core_num = -1` and no vertices.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::time::{Duration, Instant};

use crate::decomp::{decompose_for_k, max_k, weak_components, CoreLevels};
use crate::error::GraphError;
use crate::graph::{DirectedGraph, VertexId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub u32);

impl NodeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

const NO_NODE: u32 = u32::MAX;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeNode {
    pub parent: Option<NodeId>,
    pub children: Vec<NodeId>,
    pub vset: Vec<VertexId>,
    pub core_num: i32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KTree {
    pub k: usize,
    nodes: Vec<TreeNode>,
    root: NodeId,
    vmap: Vec<u32>,
}

impl KTree {
    /// A tree holding only the root sentinel, with a vertex map over `n` vertices.
    pub fn new(k: usize, n: usize) -> Self {
        KTree {
            k,
            nodes: vec![TreeNode {
                parent: None,
                children: Vec::new(),
                vset: Vec::new(),
                core_num: -1,
            }],
            root: NodeId(0),
            vmap: vec![NO_NODE; n],
        }
    }

    pub fn root(&self) -> NodeId {
        self.root
    }

    pub fn node(&self, id: NodeId) -> &TreeNode {
        &self.nodes[id.index()]
    }

    pub fn nodes(&self) -> &[TreeNode] {
        &self.nodes
    }

    /// Number of nodes including the root sentinel.
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.len() <= 1
    }

    /// Adds a detached node.
    pub fn add_node(&mut self, core_num: i32, vset: Vec<VertexId>) -> NodeId {
        let id = NodeId(self.nodes.len() as u32);
        for &v in &vset {
            self.vmap[v as usize] = id.0;
        }
        self.nodes.push(TreeNode {
            parent: None,
            children: Vec::new(),
            vset,
            core_num,
        });
        id
    }

    pub fn link(&mut self, parent: NodeId, child: NodeId) {
        debug_assert!(self.nodes[child.index()].parent.is_none());
        self.nodes[child.index()].parent = Some(parent);
        self.nodes[parent.index()].children.push(child);
    }

    pub(crate) fn node_mut(&mut self, id: NodeId) -> &mut TreeNode {
        &mut self.nodes[id.index()]
    }

    pub(crate) fn set_vmap(&mut self, v: VertexId, node: Option<NodeId>) {
        self.vmap[v as usize] = node.map_or(NO_NODE, |p| p.0);
    }

    /// Number of vertices the vertex map covers.
    pub fn vertex_capacity(&self) -> usize {
        self.vmap.len()
    }

    pub(crate) fn resize_vmap(&mut self, n: usize) {
        self.vmap.resize(n, NO_NODE);
    }

    /// Forgets vertex `v`: drops it from every vSet and shifts larger ids down.
    pub(crate) fn drop_vertex(&mut self, v: VertexId) {
        for node in &mut self.nodes {
            node.vset.retain(|&x| x != v);
            for x in &mut node.vset {
                if *x > v {
                    *x -= 1;
                }
            }
        }
        self.vmap.remove(v as usize);
        self.rebuild_vmap();
    }

    /// Node whose vSet contains `v`, if `v` is in the (k,0)-core.
    #[inline]
    pub fn node_of(&self, v: VertexId) -> Option<NodeId> {
        match self.vmap.get(v as usize) {
            Some(&id) if id != NO_NODE => Some(NodeId(id)),
            _ => None,
        }
    }

    /// Recomputes the vertex map from the node vSets.
    pub fn rebuild_vmap(&mut self) {
        self.vmap.iter_mut().for_each(|x| *x = NO_NODE);
        for (i, node) in self.nodes.iter().enumerate() {
            for &v in &node.vset {
                self.vmap[v as usize] = i as u32;
            }
        }
    }

    /// Highest ancestor of `p` (inclusive) whose core number is at least `l`.
    /// `p` itself must satisfy the bound.
    pub fn top_at_level(&self, p: NodeId, l: i32) -> NodeId {
        let mut top = p;
        while let Some(parent) = self.nodes[top.index()].parent {
            if parent == self.root || self.nodes[parent.index()].core_num < l {
                break;
            }
            top = parent;
        }
        top
    }

    /// All vertices stored in the subtree under `p`, plus the number of nodes visited.
    pub fn subtree_vertices(&self, p: NodeId) -> (Vec<VertexId>, usize) {
        let mut out = Vec::new();
        let mut stack = vec![p];
        let mut visited = 0;
        while let Some(x) = stack.pop() {
            visited += 1;
            let node = &self.nodes[x.index()];
            out.extend_from_slice(&node.vset);
            stack.extend_from_slice(&node.children);
        }
        (out, visited)
    }

    /// Preorder node ids starting at the root.
    pub fn preorder(&self) -> Vec<NodeId> {
        let mut order = Vec::with_capacity(self.nodes.len());
        let mut stack = vec![self.root];
        while let Some(x) = stack.pop() {
            order.push(x);
            for &c in self.nodes[x.index()].children.iter().rev() {
                stack.push(c);
            }
        }
        order
    }

    /// Sorted vSets, children ordered by smallest subtree vertex, node ids in
    /// preorder. Unreachable nodes are dropped.
    pub fn canonicalize(&mut self) {
        for node in &mut self.nodes {
            node.vset.sort_unstable();
        }
        // post-order minimum per subtree
        let mut min_v = vec![VertexId::MAX; self.nodes.len()];
        let order = self.preorder();
        for &x in order.iter().rev() {
            let node = &self.nodes[x.index()];
            let mut m = node.vset.first().copied().unwrap_or(VertexId::MAX);
            for &c in &node.children {
                m = m.min(min_v[c.index()]);
            }
            min_v[x.index()] = m;
        }
        for node in &mut self.nodes {
            node.children.sort_by_key(|c| (min_v[c.index()], c.0));
        }
        let order = self.preorder();
        let mut remap = vec![NO_NODE; self.nodes.len()];
        for (i, &x) in order.iter().enumerate() {
            remap[x.index()] = i as u32;
        }
        let mut old: Vec<Option<TreeNode>> = std::mem::take(&mut self.nodes).into_iter().map(Some).collect();
        self.nodes = order
            .iter()
            .map(|&x| {
                let mut node = old[x.index()].take().expect("node visited twice");
                node.parent = node.parent.map(|p| NodeId(remap[p.index()]));
                for c in &mut node.children {
                    *c = NodeId(remap[c.index()]);
                }
                node
            })
            .collect();
        self.root = NodeId(0);
        self.rebuild_vmap();
    }

    /// Total vertices stored across node vSets.
    pub fn entries(&self) -> usize {
        self.nodes.iter().map(|n| n.vset.len()).sum()
    }

    /// Structural checks that need no graph: root sentinel, parent/child
    /// agreement, nonempty vSets, strictly increasing core numbers, disjoint
    /// vSets and a vertex map that agrees with them.
    pub fn validate_structure(&self) -> Result<(), String> {
        let k = self.k;
        let root = &self.nodes[self.root.index()];
        if root.core_num != -1 || !root.vset.is_empty() || root.parent.is_some() {
            return Err(format!("tree {k}: malformed root sentinel"));
        }
        let mut owner = vec![NO_NODE; self.vmap.len()];
        let order = self.preorder();
        if order.len() != self.nodes.len() {
            return Err(format!("tree {k}: {} unreachable nodes", self.nodes.len() - order.len()));
        }
        for &x in &order {
            let node = &self.nodes[x.index()];
            for &c in &node.children {
                let child = &self.nodes[c.index()];
                if child.parent != Some(x) {
                    return Err(format!("tree {k}: child {} does not point back to {}", c.0, x.0));
                }
                if child.core_num <= node.core_num {
                    return Err(format!(
                        "tree {k}: core number {} under {} is not increasing",
                        child.core_num, node.core_num
                    ));
                }
            }
            if x != self.root && node.vset.is_empty() {
                return Err(format!("tree {k}: node {} has an empty vSet", x.0));
            }
            for &v in &node.vset {
                let slot = owner
                    .get_mut(v as usize)
                    .ok_or_else(|| format!("tree {k}: vertex {v} out of range"))?;
                if *slot != NO_NODE {
                    return Err(format!("tree {k}: vertex {v} stored twice"));
                }
                *slot = x.0;
            }
        }
        if owner != self.vmap {
            return Err(format!("tree {k}: vertex map disagrees with vSets"));
        }
        Ok(())
    }

    /// Checks the tree against the graph: vSets hold exactly the vertices at
    /// their level, and every subtree is one weak component of the matching core.
    pub fn check_semantics(&self, g: &DirectedGraph, levels: &CoreLevels) -> Result<(), String> {
        let k = self.k;
        for v in g.vertices() {
            let expect = levels.get(v);
            match self.node_of(v) {
                None if expect >= 0 => return Err(format!("tree {k}: vertex {v} missing")),
                Some(p) if self.nodes[p.index()].core_num != expect => {
                    return Err(format!(
                        "tree {k}: vertex {v} stored at level {} but has level {expect}",
                        self.nodes[p.index()].core_num
                    ))
                }
                _ => {}
            }
        }
        let mut by_level: HashMap<i32, Vec<Vec<VertexId>>> = HashMap::new();
        for (i, node) in self.nodes.iter().enumerate() {
            if NodeId(i as u32) == self.root {
                continue;
            }
            let mut sub = self.subtree_vertices(NodeId(i as u32)).0;
            sub.sort_unstable();
            let l = node.core_num;
            let comps = by_level
                .entry(l)
                .or_insert_with(|| weak_components(g, &levels.core(l)));
            if comps.binary_search(&sub).is_err() {
                return Err(format!(
                    "tree {k}: subtree at node {i} (level {l}) is not a component of the core"
                ));
            }
        }
        Ok(())
    }
}

/// Answer to a community query.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CommunityResult {
    /// Community members, in traversal order.
    pub vertices: Vec<VertexId>,
    pub nodes_visited: usize,
    pub elapsed: Duration,
}

impl CommunityResult {
    pub fn sorted(&self) -> Vec<VertexId> {
        let mut v = self.vertices.clone();
        v.sort_unstable();
        v
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }
}

/// One tree per `k` in `0..=kmax` plus the label table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DForest {
    pub trees: Vec<KTree>,
    labels: Vec<String>,
    index: HashMap<String, VertexId>,
    pub m: u64,
    pub builder: String,
}

impl DForest {
    pub fn new(trees: Vec<KTree>, labels: Vec<String>, m: u64, builder: &str) -> Self {
        let index = labels
            .iter()
            .enumerate()
            .map(|(i, l)| (l.clone(), i as VertexId))
            .collect();
        DForest {
            trees,
            labels,
            index,
            m,
            builder: builder.to_string(),
        }
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    /// `-1` for an empty graph.
    pub fn kmax(&self) -> i32 {
        self.trees.len() as i32 - 1
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, v: VertexId) -> &str {
        &self.labels[v as usize]
    }

    pub fn vertex(&self, label: &str) -> Result<VertexId, GraphError> {
        self.index
            .get(label)
            .copied()
            .ok_or_else(|| GraphError::UnknownVertex(label.to_string()))
    }

    pub(crate) fn set_labels(&mut self, labels: Vec<String>) {
        self.index = labels
            .iter()
            .enumerate()
            .map(|(i, l)| (l.clone(), i as VertexId))
            .collect();
        self.labels = labels;
    }

    /// Community of `q` for thresholds `(k, l)`: locate `q`'s node, climb to
    /// the highest ancestor with core number >= `l`, return that subtree.
    pub fn query_csd(&self, q: VertexId, k: usize, l: usize) -> Result<CommunityResult, GraphError> {
        let start = Instant::now();
        if q as usize >= self.n() {
            return Err(GraphError::OutOfRange {
                id: q as u64,
                n: self.n(),
            });
        }
        let Some(tree) = self.trees.get(k) else {
            return Ok(CommunityResult::default());
        };
        let Some(p) = tree.node_of(q) else {
            return Ok(CommunityResult {
                elapsed: start.elapsed(),
                ..Default::default()
            });
        };
        if tree.node(p).core_num < l as i32 {
            return Ok(CommunityResult {
                nodes_visited: 1,
                elapsed: start.elapsed(),
                ..Default::default()
            });
        }
        let top = tree.top_at_level(p, l as i32);
        let (vertices, visited) = tree.subtree_vertices(top);
        // the parent that stopped the climb
        let terminator = usize::from(tree.node(top).parent.is_some());
        Ok(CommunityResult {
            vertices,
            nodes_visited: visited + terminator,
            elapsed: start.elapsed(),
        })
    }

    pub fn query_label(&self, label: &str, k: usize, l: usize) -> Result<CommunityResult, GraphError> {
        self.query_csd(self.vertex(label)?, k, l)
    }

    pub fn canonicalize(&mut self) {
        for t in &mut self.trees {
            t.canonicalize();
        }
    }

    pub fn canonicalized(mut self) -> Self {
        self.canonicalize();
        self
    }

    /// Vertices stored across all node vSets of all trees.
    pub fn total_entries(&self) -> usize {
        self.trees.iter().map(KTree::entries).sum()
    }

    /// Nodes across all trees, root sentinels excluded.
    pub fn node_count(&self) -> usize {
        self.trees.iter().map(|t| t.len() - 1).sum()
    }

    pub fn validate_structure(&self) -> Result<(), String> {
        for (k, t) in self.trees.iter().enumerate() {
            if t.k != k {
                return Err(format!("tree at position {k} claims k = {}", t.k));
            }
            if t.vertex_capacity() != self.n() {
                return Err(format!("tree {k}: vertex map size mismatch"));
            }
            t.validate_structure()?;
            if t.is_empty() {
                return Err(format!("tree {k} is empty"));
            }
        }
        Ok(())
    }

    /// Full recomputation check against `g`.
    pub fn check_semantics(&self, g: &DirectedGraph) -> Result<(), String> {
        self.validate_structure()?;
        if self.kmax() != max_k(g) {
            return Err(format!("kmax {} but graph has {}", self.kmax(), max_k(g)));
        }
        for t in &self.trees {
            t.check_semantics(g, &decompose_for_k(g, t.k))?;
        }
        Ok(())
    }

    /// One line per node: `k depth coreNum labels...`, in preorder.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for t in &self.trees {
            let mut stack = vec![(t.root(), 0usize)];
            while let Some((x, depth)) = stack.pop() {
                let node = t.node(x);
                let mut names: Vec<&str> = node.vset.iter().map(|&v| self.label(v)).collect();
                names.sort_unstable();
                let _ = writeln!(out, "{} {} {} {}", t.k, depth, node.core_num, names.join(" "));
                for &c in node.children.iter().rev() {
                    stack.push((c, depth + 1));
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain_tree() -> KTree {
        // root -> a(1,{4}) -> b(3,{0,1,2,3})
        let mut t = KTree::new(1, 5);
        let b = t.add_node(3, vec![3, 1, 0, 2]);
        let a = t.add_node(1, vec![4]);
        let root = t.root();
        t.link(root, a);
        t.link(a, b);
        t
    }

    #[test]
    fn level_skipping_query() {
        let f = DForest::new(
            vec![KTree::new(0, 5), chain_tree()],
            (0..5).map(|i| i.to_string()).collect(),
            14,
            "manual",
        );
        let r = f.query_csd(0, 1, 2).unwrap();
        assert_eq!(r.sorted(), vec![0, 1, 2, 3]);
        assert_eq!(r.nodes_visited, 2);
        let r = f.query_csd(4, 1, 1).unwrap();
        assert_eq!(r.sorted(), vec![0, 1, 2, 3, 4]);
        assert!(f.query_csd(4, 1, 2).unwrap().is_empty());
        assert!(f.query_csd(0, 7, 0).unwrap().is_empty());
        assert_eq!(
            f.query_csd(9, 1, 1),
            Err(GraphError::OutOfRange { id: 9, n: 5 })
        );
        assert_eq!(
            f.query_label("x", 1, 1),
            Err(GraphError::UnknownVertex("x".into()))
        );
    }

    #[test]
    fn canonical_form_is_idempotent() {
        let mut t = chain_tree();
        t.canonicalize();
        assert_eq!(t.node(NodeId(1)).core_num, 1);
        assert_eq!(t.node(NodeId(2)).vset, vec![0, 1, 2, 3]);
        let once = t.clone();
        t.canonicalize();
        assert_eq!(t, once);
        t.validate_structure().unwrap();
    }

    #[test]
    fn structure_violations_are_reported() {
        let mut t = chain_tree();
        t.node_mut(NodeId(1)).core_num = 0;
        assert!(t.validate_structure().unwrap_err().contains("not increasing"));

        let mut t = chain_tree();
        t.node_mut(NodeId(2)).vset.push(0);
        assert!(t.validate_structure().is_err());
    }
}
