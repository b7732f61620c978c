//! Fixtures, seeded generators and brute-force oracles.
//!
//! Nothing here calls into the production peeling, decomposition or index
//! code: the oracles are deliberately naive so that they can be used to check
//! those paths.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::{DirectedGraph, GraphBuilder, VertexId};
use crate::maintenance::UpdateOp;

#[derive(Debug, Error, PartialEq)]
pub enum TestkitError {
    #[error("invalid generator parameter: {0}")]
    InvalidParameter(String),
    #[error("exhaustive oracle supports at most 8 vertices, got {0}")]
    TooLarge(usize),
    #[error("unknown fixture `{0}`")]
    UnknownFixture(String),
}

/// A small named graph embedded as a constant edge list.
#[derive(Debug, Clone, Copy)]
pub struct Fixture {
    pub name: &'static str,
    pub edges: &'static str,
    pub commentary: &'static str,
}

impl Fixture {
    pub fn graph(&self) -> DirectedGraph {
        let mut b = GraphBuilder::new();
        for line in self.edges.lines() {
            let mut t = line.split_whitespace();
            if let (Some(u), Some(v)) = (t.next(), t.next()) {
                b.add_edge(u, v);
            }
        }
        b.finish().0
    }
}

const FIXTURES: &[Fixture] = &[
    Fixture {
        name: "F1",
        edges: "0 1\n1 2\n2 0",
        commentary: "directed 3-cycle",
    },
    Fixture {
        name: "F2",
        edges: "0 1\n1 2\n2 0\n3 4\n4 5\n5 3",
        commentary: "two disjoint 3-cycles",
    },
    Fixture {
        name: "F3",
        edges: "0 1\n0 2\n0 3\n1 0\n1 2\n1 3\n2 0\n2 1\n2 3\n3 0\n3 1\n3 2",
        commentary: "bidirected K4",
    },
    Fixture {
        name: "F4",
        edges: "0 1\n0 2\n0 3\n1 0\n1 2\n1 3\n2 0\n2 1\n2 3\n3 0\n3 1\n3 2\n4 0\n0 4",
        commentary: "bidirected K4 plus pendant 4 with 4->0 and 0->4",
    },
    Fixture {
        name: "F5",
        edges: "0 1\n1 2",
        commentary: "path 0->1->2",
    },
    Fixture {
        name: "F7",
        edges: "0 1\n1 2\n2 0\n3 4\n4 5\n5 3\n2 3",
        commentary: "two 3-cycles joined by the one-way bridge 2->3",
    },
    Fixture {
        name: "F8",
        edges: "A B\nA C\nA D\nB A\nB C\nB D\nC A\nC B\nC D\nD A\nD B\nD C\n\
                F G\nG H\nH F\nF A\nG B\nH C\nD E\nE F\n\
                I J\nJ K\nK I\nL M\nM L",
        commentary: "labelled graph whose 1-tree has a level-2 node {F,G,H} above the K4 {A,B,C,D}",
    },
];

pub fn fixtures() -> &'static [Fixture] {
    FIXTURES
}

/// Graph of the named fixture. Panics on an unknown name.
pub fn fixture(name: &str) -> DirectedGraph {
    try_fixture(name).unwrap()
}

pub fn try_fixture(name: &str) -> Result<DirectedGraph, TestkitError> {
    FIXTURES
        .iter()
        .find(|f| f.name == name)
        .map(Fixture::graph)
        .ok_or_else(|| TestkitError::UnknownFixture(name.to_string()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphKind {
    /// Every ordered pair `(u, v)`, `u != v`, is an edge with probability `param`.
    Uniform,
    /// Preferential attachment: each new vertex attaches `param` edges to
    /// degree-weighted targets, each edge oriented by a fair coin.
    PowerLaw,
}

pub fn random_digraph(
    kind: GraphKind,
    n: usize,
    param: f64,
    seed: u64,
) -> Result<DirectedGraph, TestkitError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges: Vec<(VertexId, VertexId)> = Vec::new();
    match kind {
        GraphKind::Uniform => {
            if !(0.0..=1.0).contains(&param) {
                return Err(TestkitError::InvalidParameter(format!("p = {param}")));
            }
            for u in 0..n as VertexId {
                for v in 0..n as VertexId {
                    if u != v && rng.gen_bool(param) {
                        edges.push((u, v));
                    }
                }
            }
        }
        GraphKind::PowerLaw => {
            if !(param >= 1.0 && param.fract() == 0.0) {
                return Err(TestkitError::InvalidParameter(format!(
                    "edges per vertex = {param}"
                )));
            }
            let d = param as usize;
            let seed_size = (d + 1).min(n);
            let mut endpoints: Vec<VertexId> = Vec::new();
            let orient = |rng: &mut ChaCha8Rng, a: VertexId, b: VertexId| {
                if rng.gen_bool(0.5) {
                    (a, b)
                } else {
                    (b, a)
                }
            };
            for a in 0..seed_size as VertexId {
                for b in a + 1..seed_size as VertexId {
                    edges.push(orient(&mut rng, a, b));
                    endpoints.push(a);
                    endpoints.push(b);
                }
            }
            let mut picked: Vec<VertexId> = Vec::with_capacity(d);
            for t in seed_size as VertexId..n as VertexId {
                picked.clear();
                let mut attempts = 0;
                while picked.len() < d.min(t as usize) && attempts < 20 * d {
                    attempts += 1;
                    let target = if endpoints.is_empty() {
                        rng.gen_range(0..t)
                    } else {
                        *endpoints.choose(&mut rng).unwrap()
                    };
                    if !picked.contains(&target) {
                        picked.push(target);
                    }
                }
                for &target in &picked {
                    edges.push(orient(&mut rng, t, target));
                    endpoints.push(t);
                    endpoints.push(target);
                }
            }
        }
    }
    Ok(DirectedGraph::from_edges(n, &edges))
}

fn induced_degrees(g: &DirectedGraph, inside: &[bool], v: VertexId) -> (usize, usize) {
    let i = g.in_neighbors(v).iter().filter(|&&u| inside[u as usize]).count();
    let o = g.out_neighbors(v).iter().filter(|&&u| inside[u as usize]).count();
    (i, o)
}

fn members(inside: &[bool]) -> Vec<VertexId> {
    inside
        .iter()
        .enumerate()
        .filter(|&(_, &b)| b)
        .map(|(v, _)| v as VertexId)
        .collect()
}

/// Union of every vertex subset whose induced subgraph meets both degree bounds.
pub fn subset_core_oracle(g: &DirectedGraph, k: usize, l: usize) -> Result<Vec<VertexId>, TestkitError> {
    let n = g.n();
    if n > 8 {
        return Err(TestkitError::TooLarge(n));
    }
    let mut union = vec![false; n];
    for mask in 1u32..(1u32 << n) {
        let inside: Vec<bool> = (0..n).map(|v| mask & (1 << v) != 0).collect();
        let feasible = (0..n as VertexId)
            .filter(|&v| inside[v as usize])
            .all(|v| {
                let (i, o) = induced_degrees(g, &inside, v);
                i >= k && o >= l
            });
        if feasible {
            for v in 0..n {
                union[v] |= inside[v];
            }
        }
    }
    Ok(members(&union))
}

/// Peeling by full rescans until nothing changes. Quadratic, independent of
/// the production peeler.
pub fn naive_core_within(g: &DirectedGraph, set: &[VertexId], k: usize, l: usize) -> Vec<VertexId> {
    let mut inside = vec![false; g.n()];
    for &v in set {
        inside[v as usize] = true;
    }
    loop {
        let doomed: Vec<VertexId> = members(&inside)
            .into_iter()
            .filter(|&v| {
                let (i, o) = induced_degrees(g, &inside, v);
                i < k || o < l
            })
            .collect();
        if doomed.is_empty() {
            return members(&inside);
        }
        for v in doomed {
            inside[v as usize] = false;
        }
    }
}

pub fn naive_core(g: &DirectedGraph, k: usize, l: usize) -> Vec<VertexId> {
    let all: Vec<VertexId> = g.vertices().collect();
    naive_core_within(g, &all, k, l)
}

fn reach(g: &DirectedGraph, inside: &[bool], q: VertexId, forward: bool, backward: bool) -> Vec<bool> {
    let mut seen = vec![false; g.n()];
    seen[q as usize] = true;
    let mut stack = vec![q];
    while let Some(v) = stack.pop() {
        let mut next: Vec<VertexId> = Vec::new();
        if forward {
            next.extend_from_slice(g.out_neighbors(v));
        }
        if backward {
            next.extend_from_slice(g.in_neighbors(v));
        }
        for w in next {
            if inside[w as usize] && !seen[w as usize] {
                seen[w as usize] = true;
                stack.push(w);
            }
        }
    }
    seen
}

fn mask(g: &DirectedGraph, set: &[VertexId]) -> Vec<bool> {
    let mut inside = vec![false; g.n()];
    for &v in set {
        inside[v as usize] = true;
    }
    inside
}

/// Weak component of `q` in `set` by plain reachability over both directions.
pub fn naive_weak_component(g: &DirectedGraph, set: &[VertexId], q: VertexId) -> Vec<VertexId> {
    let inside = mask(g, set);
    if !inside[q as usize] {
        return Vec::new();
    }
    members(&reach(g, &inside, q, true, true))
}

/// Strongly connected component of `q` in `set` as forward ∩ backward reachability.
pub fn naive_scc(g: &DirectedGraph, set: &[VertexId], q: VertexId) -> Vec<VertexId> {
    let inside = mask(g, set);
    if !inside[q as usize] {
        return Vec::new();
    }
    let fwd = reach(g, &inside, q, true, false);
    let bwd = reach(g, &inside, q, false, true);
    let both: Vec<bool> = fwd.iter().zip(&bwd).map(|(a, b)| *a && *b).collect();
    members(&both)
}

/// Index-free community: naive peel then naive weak component.
pub fn naive_csd(g: &DirectedGraph, q: VertexId, k: usize, l: usize) -> Vec<VertexId> {
    let core = naive_core(g, k, l);
    naive_weak_component(g, &core, q)
}

/// Alternates peeling and SCC extraction from scratch until the SCC of `q`
/// is degree-feasible.
pub fn scsd_fixpoint_oracle(g: &DirectedGraph, q: VertexId, k: usize, l: usize) -> Vec<VertexId> {
    let mut working: Vec<VertexId> = g.vertices().collect();
    loop {
        let core = naive_core_within(g, &working, k, l);
        let comp = naive_weak_component(g, &core, q);
        if comp.is_empty() {
            return Vec::new();
        }
        let scc = naive_scc(g, &comp, q);
        if is_degree_feasible(g, &scc, k, l) {
            return scc;
        }
        working = scc;
    }
}

/// Every member of `set` has in-degree >= k and out-degree >= l inside `set`.
pub fn is_degree_feasible(g: &DirectedGraph, set: &[VertexId], k: usize, l: usize) -> bool {
    let inside = mask(g, set);
    set.iter().all(|&v| {
        let (i, o) = induced_degrees(g, &inside, v);
        i >= k && o >= l
    })
}

/// Every member of `set` reaches every other inside `set`.
pub fn is_strongly_connected(g: &DirectedGraph, set: &[VertexId]) -> bool {
    match set.first() {
        None => true,
        Some(&q) => naive_scc(g, set, q).len() == set.len(),
    }
}

/// The weakly connected graph used by the seeded random corpus.
pub fn corpus_graph(index: usize) -> DirectedGraph {
    let sizes = [20usize, 50, 200];
    let n = sizes[index % 3];
    let seed = 1000 + index as u64;
    if (index / 3) % 2 == 0 {
        // keep average total degree around 8 regardless of n
        let p = (4.0 / n as f64).min(0.5);
        random_digraph(GraphKind::Uniform, n, p, seed).unwrap()
    } else {
        random_digraph(GraphKind::PowerLaw, n, 3.0, seed).unwrap()
    }
}

/// Random small digraph for exhaustive checks.
pub fn tiny_graph(n: usize, p: f64, seed: u64) -> DirectedGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for u in 0..n as VertexId {
        for v in 0..n as VertexId {
            if u != v && rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    edges.shuffle(&mut rng);
    DirectedGraph::from_edges(n, &edges)
}

/// Seeded stream of edge inserts and deletes against `g`, each valid for
/// the graph produced by the ops before it (inserts hit absent edges,
/// deletes hit present ones).
pub fn random_edge_ops(g: &DirectedGraph, count: usize, seed: u64) -> Vec<UpdateOp> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = g.clone();
    let n = g.n() as VertexId;
    let mut ops = Vec::with_capacity(count);
    if n < 2 {
        return ops;
    }
    let mut edges: Vec<(VertexId, VertexId)> = g.edges().collect();
    while ops.len() < count {
        let insert = edges.is_empty() || rng.gen_bool(0.5);
        if insert {
            let u = rng.gen_range(0..n);
            let v = rng.gen_range(0..n);
            if u == v || g.has_edge(u, v) {
                continue;
            }
            g.insert_edge(u, v).unwrap();
            edges.push((u, v));
            ops.push(UpdateOp::InsertEdge(g.label(u).into(), g.label(v).into()));
        } else {
            let i = rng.gen_range(0..edges.len());
            let (u, v) = edges.swap_remove(i);
            g.remove_edge(u, v).unwrap();
            ops.push(UpdateOp::DeleteEdge(g.label(u).into(), g.label(v).into()));
        }
    }
    ops
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixture_shapes() {
        let f1 = fixture("F1");
        assert_eq!((f1.n(), f1.m()), (3, 3));
        assert_eq!(fixture("F3").m(), 12);
        let f7 = fixture("F7");
        let all: Vec<VertexId> = f7.vertices().collect();
        assert_eq!(naive_weak_component(&f7, &all, 0).len(), 6);
        assert!(!is_strongly_connected(&f7, &all));
        assert!(try_fixture("F6").is_err());
    }

    #[test]
    fn generator_determinism() {
        let empty = random_digraph(GraphKind::Uniform, 0, 0.3, 1).unwrap();
        assert_eq!(empty.n(), 0);
        let a = random_digraph(GraphKind::Uniform, 50, 0.1, 42).unwrap();
        let b = random_digraph(GraphKind::Uniform, 50, 0.1, 42).unwrap();
        assert_eq!(a, b);
        let c = random_digraph(GraphKind::PowerLaw, 300, 3.0, 9).unwrap();
        let d = random_digraph(GraphKind::PowerLaw, 300, 3.0, 9).unwrap();
        assert_eq!(c, d);
        assert!(random_digraph(GraphKind::Uniform, 5, 1.5, 0).is_err());
        assert!(random_digraph(GraphKind::PowerLaw, 5, 0.0, 0).is_err());
    }

    #[test]
    fn golden_uniform_edge_count() {
        let g = random_digraph(GraphKind::Uniform, 50, 0.1, 42).unwrap();
        assert_eq!(g.m(), GOLDEN_G50_EDGES);
    }

    const GOLDEN_G50_EDGES: usize = 222;

    #[test]
    fn power_law_is_skewed() {
        let g = random_digraph(GraphKind::PowerLaw, 2000, 3.0, 5).unwrap();
        let max_in = g.vertices().map(|v| g.in_degree(v)).max().unwrap();
        let max_out = g.vertices().map(|v| g.out_degree(v)).max().unwrap();
        let avg = g.m() as f64 / g.n() as f64;
        assert!(max_in as f64 > 5.0 * avg && max_out as f64 > 5.0 * avg);
    }

    #[test]
    fn subset_oracle_examples() {
        assert_eq!(subset_core_oracle(&fixture("F1"), 1, 1).unwrap(), vec![0, 1, 2]);
        assert!(subset_core_oracle(&fixture("F5"), 1, 1).unwrap().is_empty());
        assert_eq!(
            subset_core_oracle(&DirectedGraph::with_vertices(9), 0, 0),
            Err(TestkitError::TooLarge(9))
        );
    }

    #[test]
    fn edge_ops_are_valid_and_seeded() {
        let g = random_digraph(GraphKind::Uniform, 30, 0.1, 1).unwrap();
        let ops = random_edge_ops(&g, 200, 5);
        assert_eq!(ops, random_edge_ops(&g, 200, 5));
        let mut h = g.clone();
        for op in &ops {
            match op {
                UpdateOp::InsertEdge(a, b) => {
                    assert!(h.insert_edge(h.lookup(a).unwrap(), h.lookup(b).unwrap()).unwrap())
                }
                UpdateOp::DeleteEdge(a, b) => {
                    assert!(h.remove_edge(h.lookup(a).unwrap(), h.lookup(b).unwrap()).unwrap())
                }
                _ => unreachable!(),
            }
        }
    }

    #[test]
    fn scc_oracle_examples() {
        let f7 = fixture("F7");
        let all: Vec<VertexId> = f7.vertices().collect();
        assert_eq!(naive_scc(&f7, &all, 0), vec![0, 1, 2]);
        assert_eq!(naive_scc(&fixture("F5"), &[0, 1, 2], 1), vec![1]);
        assert_eq!(scsd_fixpoint_oracle(&f7, 3, 1, 1), vec![3, 4, 5]);
    }
}
