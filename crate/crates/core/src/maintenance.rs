//! Keeping a D-Forest in step with edge and vertex updates.
//!
//! Every update recomputes the level arrays of the trees it can affect and
//! diffs them against the retained ones. A tree whose levels and relevant
//! connectivity are unchanged is left alone. An insertion that lifts a single
//! endpoint without merging components moves that vertex between nodes in
//! place; anything else rebuilds the one tree from its new levels.

use std::collections::HashSet;
use std::fmt;
use std::io::{BufRead, BufReader, Read};

use crate::bottomup::{build_bottomup, build_tree_from_levels};
use crate::decomp::{decompose_for_k, CoreLevels};
use crate::error::{GraphError, ParseError};
use crate::graph::{DirectedGraph, VertexId};
use crate::index::{DForest, KTree, NodeId};

/// One line of an update stream.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum UpdateOp {
    InsertEdge(String, String),
    DeleteEdge(String, String),
    AddVertex(String),
    RemoveVertex(String),
}

impl fmt::Display for UpdateOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            UpdateOp::InsertEdge(u, v) => write!(f, "+ {u} {v}"),
            UpdateOp::DeleteEdge(u, v) => write!(f, "- {u} {v}"),
            UpdateOp::AddVertex(v) => write!(f, "+v {v}"),
            UpdateOp::RemoveVertex(v) => write!(f, "-v {v}"),
        }
    }
}

/// Parses one stream line; `None` for blank lines and `#` comments.
pub fn parse_update(line: &str) -> Option<Result<UpdateOp, ()>> {
    let t = line.trim();
    if t.is_empty() || t.starts_with('#') {
        return None;
    }
    let tokens: Vec<&str> = t.split_whitespace().collect();
    let op = match tokens.as_slice() {
        ["+", u, v] => UpdateOp::InsertEdge(u.to_string(), v.to_string()),
        ["-", u, v] => UpdateOp::DeleteEdge(u.to_string(), v.to_string()),
        ["+v", v] => UpdateOp::AddVertex(v.to_string()),
        ["-v", v] => UpdateOp::RemoveVertex(v.to_string()),
        _ => return Some(Err(())),
    };
    Some(Ok(op))
}

/// Reads a whole stream, failing on the first unrecognized line.
pub fn parse_update_stream<R: Read>(source: R) -> Result<Vec<UpdateOp>, ParseError> {
    let mut ops = Vec::new();
    for (i, line) in BufReader::new(source).lines().enumerate() {
        let line = line?;
        match parse_update(&line) {
            None => {}
            Some(Ok(op)) => ops.push(op),
            Some(Err(())) => {
                return Err(ParseError::BadUpdate {
                    line: i + 1,
                    text: line.trim().to_string(),
                })
            }
        }
    }
    Ok(ops)
}

/// What an update did to the index.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct UpdateReport {
    /// `false` when the update was a no-op (duplicate insert, missing edge).
    pub applied: bool,
    /// Trees whose levels were recomputed.
    pub examined: usize,
    /// Trees that changed, ascending.
    pub changed: Vec<usize>,
    /// Changed trees patched in place rather than rebuilt.
    pub patched: usize,
}

impl UpdateReport {
    fn merge(&mut self, other: UpdateReport) {
        self.applied |= other.applied;
        self.examined += other.examined;
        self.changed.extend(other.changed);
        self.changed.sort_unstable();
        self.changed.dedup();
        self.patched += other.patched;
    }
}

#[derive(Debug, Clone)]
pub struct MaintainableIndex {
    forest: DForest,
    graph: DirectedGraph,
    /// `levels[k]` is `decompose_for_k(graph, k)` for every tree.
    levels: Vec<CoreLevels>,
}

impl MaintainableIndex {
    pub fn new(graph: DirectedGraph) -> Self {
        let forest = build_bottomup(&graph);
        Self::assemble(graph, forest)
    }

    /// Pairs a previously built index with its graph. The labels must agree.
    pub fn from_parts(graph: DirectedGraph, forest: DForest) -> Result<Self, GraphError> {
        if forest.labels() != graph.labels() {
            return Err(GraphError::IndexMismatch("vertex labels differ".into()));
        }
        if forest.m != graph.m() as u64 {
            return Err(GraphError::IndexMismatch(format!(
                "index built for {} edges, graph has {}",
                forest.m,
                graph.m()
            )));
        }
        Ok(Self::assemble(graph, forest))
    }

    fn assemble(graph: DirectedGraph, forest: DForest) -> Self {
        let levels = (0..forest.trees.len())
            .map(|k| decompose_for_k(&graph, k))
            .collect();
        MaintainableIndex {
            forest,
            graph,
            levels,
        }
    }

    pub fn forest(&self) -> &DForest {
        &self.forest
    }

    pub fn graph(&self) -> &DirectedGraph {
        &self.graph
    }

    pub fn levels(&self) -> &[CoreLevels] {
        &self.levels
    }

    pub fn into_parts(self) -> (DirectedGraph, DForest) {
        (self.graph, self.forest)
    }

    /// Largest `k` whose (k,0)-core holds `v`.
    fn in_core(&self, v: VertexId) -> i32 {
        self.levels
            .iter()
            .rposition(|c| c.get(v) >= 0)
            .map_or(-1, |k| k as i32)
    }

    pub fn insert_edge(&mut self, u: VertexId, v: VertexId) -> Result<UpdateReport, GraphError> {
        self.graph.check(u)?;
        self.graph.check(v)?;
        let bound = self.in_core(u).min(self.in_core(v)) + 1;
        if !self.graph.insert_edge(u, v)? {
            return Ok(UpdateReport::default());
        }
        self.forest.m = self.graph.m() as u64;
        let mut report = UpdateReport {
            applied: true,
            ..Default::default()
        };
        for k in 0..=bound.max(0) as usize {
            let cur = decompose_for_k(&self.graph, k);
            report.examined += 1;
            if k == self.forest.trees.len() {
                if cur.lmax < 0 {
                    break;
                }
                let tree = build_tree_from_levels(&self.graph, &cur);
                self.forest.trees.push(tree);
                self.levels.push(cur);
                report.changed.push(k);
                continue;
            }
            let outcome = self.refresh_after_insert(k, &cur, u, v);
            self.levels[k] = cur;
            match outcome {
                Outcome::Untouched => {}
                Outcome::Patched => {
                    report.changed.push(k);
                    report.patched += 1;
                }
                Outcome::Rebuild => {
                    self.forest.trees[k] = build_tree_from_levels(&self.graph, &self.levels[k]);
                    report.changed.push(k);
                }
            }
        }
        Ok(report)
    }

    pub fn delete_edge(&mut self, u: VertexId, v: VertexId) -> Result<UpdateReport, GraphError> {
        self.graph.check(u)?;
        self.graph.check(v)?;
        let bound = self.in_core(u).min(self.in_core(v));
        if !self.graph.remove_edge(u, v)? {
            return Ok(UpdateReport::default());
        }
        self.forest.m = self.graph.m() as u64;
        let mut report = UpdateReport {
            applied: true,
            ..Default::default()
        };
        for k in 0..=bound.max(0) as usize {
            let cur = decompose_for_k(&self.graph, k);
            report.examined += 1;
            let rebuild = if cur != self.levels[k] {
                true
            } else {
                let l = cur.get(u).min(cur.get(v));
                l >= 0 && !self.connected_within(&cur, u, v, l)
            };
            self.levels[k] = cur;
            if rebuild {
                self.forest.trees[k] = build_tree_from_levels(&self.graph, &self.levels[k]);
                report.changed.push(k);
            }
        }
        while self.levels.last().is_some_and(|c| c.lmax < 0) {
            self.levels.pop();
            self.forest.trees.pop();
        }
        Ok(report)
    }

    /// Adds `label` as a new vertex, then the given incident edges one by one.
    pub fn add_vertex(
        &mut self,
        label: &str,
        out_neighbors: &[VertexId],
        in_neighbors: &[VertexId],
    ) -> Result<UpdateReport, GraphError> {
        for &x in out_neighbors.iter().chain(in_neighbors) {
            self.graph.check(x)?;
        }
        let w = self.graph.add_vertex(label)?;
        let n = self.graph.n();
        let mut labels = self.forest.labels().to_vec();
        labels.push(label.to_string());
        self.forest.set_labels(labels);
        for (k, (t, c)) in self.forest.trees.iter_mut().zip(&mut self.levels).enumerate() {
            t.resize_vmap(n);
            c.maxl.push(if k == 0 { 0 } else { -1 });
        }
        if self.forest.trees.is_empty() {
            self.forest.trees.push(KTree::new(0, n));
            self.levels.push(decompose_for_k(&self.graph, 0));
        }
        let c0 = &mut self.levels[0];
        c0.lmax = c0.lmax.max(0);
        let t0 = &mut self.forest.trees[0];
        let p = t0.add_node(0, vec![w]);
        let root = t0.root();
        t0.link(root, p);
        t0.canonicalize();

        let mut report = UpdateReport {
            applied: true,
            changed: vec![0],
            ..Default::default()
        };
        for &x in out_neighbors {
            report.merge(self.insert_edge(w, x)?);
        }
        for &x in in_neighbors {
            report.merge(self.insert_edge(x, w)?);
        }
        Ok(report)
    }

    /// Deletes every edge at `v`, then forgets `v`. Ids above `v` shift down.
    pub fn remove_vertex(&mut self, v: VertexId) -> Result<UpdateReport, GraphError> {
        self.graph.check(v)?;
        let mut report = UpdateReport::default();
        for x in self.graph.out_neighbors(v).to_vec() {
            report.merge(self.delete_edge(v, x)?);
        }
        for x in self.graph.in_neighbors(v).to_vec() {
            report.merge(self.delete_edge(x, v)?);
        }
        // now isolated: a singleton level-0 node directly under the 0-tree root
        let t0 = &mut self.forest.trees[0];
        let p = t0.node_of(v).expect("isolated vertex is in the 0-tree");
        splice_out(t0, p);
        self.graph.remove_isolated_vertex(v)?;
        for t in &mut self.forest.trees {
            t.drop_vertex(v);
            t.canonicalize();
        }
        for c in &mut self.levels {
            c.maxl.remove(v as usize);
            c.lmax = c.maxl.iter().copied().max().unwrap_or(-1);
        }
        while self.levels.last().is_some_and(|c| c.lmax < 0) {
            self.levels.pop();
            self.forest.trees.pop();
        }
        self.forest.set_labels(self.graph.labels().to_vec());
        report.applied = true;
        report.changed.push(0);
        report.changed.sort_unstable();
        report.changed.dedup();
        Ok(report)
    }

    /// Applies a labelled update. Inserting an edge registers unknown
    /// endpoints; deleting an edge between unknown labels is a no-op.
    pub fn apply(&mut self, op: &UpdateOp) -> Result<UpdateReport, GraphError> {
        match op {
            UpdateOp::InsertEdge(a, b) => {
                let mut report = UpdateReport::default();
                let mut id = |label: &str, report: &mut UpdateReport| match self.graph.vertex(label) {
                    Some(x) => Ok(x),
                    None => {
                        report.merge(self.add_vertex(label, &[], &[])?);
                        Ok::<_, GraphError>(self.graph.n() as VertexId - 1)
                    }
                };
                let u = id(a, &mut report)?;
                let v = id(b, &mut report)?;
                report.merge(self.insert_edge(u, v)?);
                Ok(report)
            }
            UpdateOp::DeleteEdge(a, b) => match (self.graph.vertex(a), self.graph.vertex(b)) {
                (Some(u), Some(v)) => self.delete_edge(u, v),
                _ => Ok(UpdateReport::default()),
            },
            UpdateOp::AddVertex(label) => self.add_vertex(label, &[], &[]),
            UpdateOp::RemoveVertex(label) => {
                let v = self.graph.lookup(label)?;
                self.remove_vertex(v)
            }
        }
    }

    /// `u` and `v` are joined by a path through vertices of level >= `l`.
    fn connected_within(&self, cur: &CoreLevels, u: VertexId, v: VertexId, l: i32) -> bool {
        let mut seen = HashSet::from([u]);
        let mut stack = vec![u];
        while let Some(x) = stack.pop() {
            if x == v {
                return true;
            }
            for y in self.graph.undirected_neighbors(x) {
                if cur.get(y) >= l && seen.insert(y) {
                    stack.push(y);
                }
            }
        }
        false
    }

    /// Decides what tree `k` needs after `u -> v` was inserted, patching it
    /// in place when a single endpoint rose without merging components.
    fn refresh_after_insert(&mut self, k: usize, cur: &CoreLevels, u: VertexId, v: VertexId) -> Outcome {
        let old = &self.levels[k];
        let tree = &self.forest.trees[k];
        if cur == old {
            let l = cur.get(u).min(cur.get(v));
            if l < 0 || same_component(tree, u, v, l) {
                return Outcome::Untouched;
            }
            return Outcome::Rebuild;
        }
        let moved: Vec<VertexId> = self
            .graph
            .vertices()
            .filter(|&x| cur.get(x) != old.get(x))
            .take(2)
            .collect();
        let [w] = moved[..] else {
            return Outcome::Rebuild;
        };
        let (a, b) = (old.get(w), cur.get(w));
        let o = if w == u { v } else { u };
        if a < 0 || b <= a || !(w == u || w == v) {
            return Outcome::Rebuild;
        }
        // the new edge must not join two old components at any level w already had
        let joined = a.min(old.get(o));
        if joined >= 0 && !same_component(tree, u, v, joined) {
            return Outcome::Rebuild;
        }
        // at every level w newly reaches it must touch exactly one old component
        let mut target = None;
        for l in a + 1..=b {
            let mut top = None;
            for x in self.graph.undirected_neighbors(w) {
                if old.get(x) < l {
                    continue;
                }
                let t = tree.top_at_level(tree.node_of(x).expect("core vertex has a node"), l);
                match top {
                    None => top = Some(t),
                    Some(s) if s != t => return Outcome::Rebuild,
                    _ => {}
                }
            }
            match top {
                None => return Outcome::Rebuild,
                Some(t) => target = Some(t),
            }
        }
        let target = target.expect("b > a");
        let tree = &mut self.forest.trees[k];
        move_vertex(tree, w, b, target);
        Outcome::Patched
    }
}

enum Outcome {
    Untouched,
    Patched,
    Rebuild,
}

/// `u` and `v` lie in the same subtree at level `l`. Both must have level >= `l`.
fn same_component(tree: &KTree, u: VertexId, v: VertexId, l: i32) -> bool {
    let (Some(pu), Some(pv)) = (tree.node_of(u), tree.node_of(v)) else {
        return false;
    };
    tree.top_at_level(pu, l) == tree.top_at_level(pv, l)
}

/// Moves `w` out of its node into level `b`, where `top` is the old subtree
/// root of the level-`b` component `w` joins.
fn move_vertex(tree: &mut KTree, w: VertexId, b: i32, top: NodeId) {
    let p = tree.node_of(w).expect("w is in the tree");
    tree.node_mut(p).vset.retain(|&x| x != w);
    if tree.node(top).core_num == b {
        tree.node_mut(top).vset.push(w);
        tree.set_vmap(w, Some(top));
    } else {
        // new node between `top` and its parent
        let parent = tree.node(top).parent.expect("non-root node has a parent");
        let fresh = tree.add_node(b, vec![w]);
        let siblings = &mut tree.node_mut(parent).children;
        let slot = siblings.iter().position(|&c| c == top).expect("child listed");
        siblings[slot] = fresh;
        tree.node_mut(fresh).parent = Some(parent);
        tree.node_mut(fresh).children.push(top);
        tree.node_mut(top).parent = Some(fresh);
    }
    if tree.node(p).vset.is_empty() {
        splice_out(tree, p);
    }
    tree.canonicalize();
}

/// Detaches `p`, handing its children to its parent.
fn splice_out(tree: &mut KTree, p: NodeId) {
    let parent = tree.node(p).parent.expect("non-root node has a parent");
    let children = std::mem::take(&mut tree.node_mut(p).children);
    for &c in &children {
        tree.node_mut(c).parent = Some(parent);
    }
    let siblings = &mut tree.node_mut(parent).children;
    siblings.retain(|&c| c != p);
    siblings.extend(children);
    tree.node_mut(p).parent = None;
    for v in std::mem::take(&mut tree.node_mut(p).vset) {
        tree.set_vmap(v, None);
    }
}
