//! Directed graph model and edge-list ingestion.
//!
//! Vertices are addressed by dense ids in `[0, n)`; the original tokens from
//! the edge list are kept alongside so results can be reported by label.

use std::collections::HashMap;
use std::fs::File;
use std::io::{self, BufRead, BufReader, Read, Write};
use std::path::Path;

use flate2::read::GzDecoder;

use crate::error::{GraphError, ParseError};

/// Dense vertex index in `[0, n)`.
pub type VertexId = u32;

/// Which adjacency to read for a vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Out,
    In,
    /// Out- and in-neighbors concatenated. A mutual pair yields the neighbor twice.
    Undirected,
}

/// Simple directed graph: no self-loops, no parallel edges, sorted adjacency.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DirectedGraph {
    out_adj: Vec<Vec<VertexId>>,
    in_adj: Vec<Vec<VertexId>>,
    m: usize,
    labels: Vec<String>,
    index: HashMap<String, VertexId>,
}

/// Counters collected while loading an edge list.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LoadReport {
    pub lines: usize,
    pub duplicates: usize,
    pub self_loops: usize,
}

impl DirectedGraph {
    /// Graph on `n` vertices labelled `"0".."n-1"`. Self-loops and duplicates are dropped.
    pub fn from_edges(n: usize, edges: &[(VertexId, VertexId)]) -> Self {
        let mut g = DirectedGraph::with_vertices(n);
        for &(u, v) in edges {
            assert!((u as usize) < n && (v as usize) < n, "edge ({u}, {v}) out of range");
            if u != v {
                g.out_adj[u as usize].push(v);
                g.in_adj[v as usize].push(u);
            }
        }
        g.normalize();
        g
    }

    /// `n` isolated vertices labelled by their ids.
    pub fn with_vertices(n: usize) -> Self {
        let labels: Vec<String> = (0..n).map(|i| i.to_string()).collect();
        let index = labels
            .iter()
            .enumerate()
            .map(|(i, l)| (l.clone(), i as VertexId))
            .collect();
        DirectedGraph {
            out_adj: vec![Vec::new(); n],
            in_adj: vec![Vec::new(); n],
            m: 0,
            labels,
            index,
        }
    }

    fn normalize(&mut self) {
        for list in self.out_adj.iter_mut().chain(self.in_adj.iter_mut()) {
            list.sort_unstable();
            list.dedup();
        }
        self.m = self.out_adj.iter().map(Vec::len).sum();
    }

    pub fn n(&self) -> usize {
        self.out_adj.len()
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn is_empty(&self) -> bool {
        self.out_adj.is_empty()
    }

    pub fn vertices(&self) -> std::ops::Range<VertexId> {
        0..self.n() as VertexId
    }

    #[inline]
    pub fn out_neighbors(&self, v: VertexId) -> &[VertexId] {
        &self.out_adj[v as usize]
    }

    #[inline]
    pub fn in_neighbors(&self, v: VertexId) -> &[VertexId] {
        &self.in_adj[v as usize]
    }

    #[inline]
    pub fn out_degree(&self, v: VertexId) -> usize {
        self.out_adj[v as usize].len()
    }

    #[inline]
    pub fn in_degree(&self, v: VertexId) -> usize {
        self.in_adj[v as usize].len()
    }

    /// Out-neighbors followed by in-neighbors.
    #[inline]
    pub fn undirected_neighbors(&self, v: VertexId) -> impl Iterator<Item = VertexId> + '_ {
        self.out_adj[v as usize]
            .iter()
            .chain(self.in_adj[v as usize].iter())
            .copied()
    }

    /// Range-checked neighbor access.
    pub fn neighbors(&self, v: VertexId, mode: Direction) -> Result<Vec<VertexId>, GraphError> {
        self.check(v)?;
        Ok(match mode {
            Direction::Out => self.out_neighbors(v).to_vec(),
            Direction::In => self.in_neighbors(v).to_vec(),
            Direction::Undirected => self.undirected_neighbors(v).collect(),
        })
    }

    pub fn has_edge(&self, u: VertexId, v: VertexId) -> bool {
        (u as usize) < self.n() && self.out_adj[u as usize].binary_search(&v).is_ok()
    }

    pub fn check(&self, v: VertexId) -> Result<(), GraphError> {
        if (v as usize) < self.n() {
            Ok(())
        } else {
            Err(GraphError::OutOfRange {
                id: v as u64,
                n: self.n(),
            })
        }
    }

    pub fn label(&self, v: VertexId) -> &str {
        &self.labels[v as usize]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn vertex(&self, label: &str) -> Option<VertexId> {
        self.index.get(label).copied()
    }

    pub fn lookup(&self, label: &str) -> Result<VertexId, GraphError> {
        self.vertex(label)
            .ok_or_else(|| GraphError::UnknownVertex(label.to_string()))
    }

    /// Iterates every edge `(u, v)` in `(u, v)` order.
    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        self.out_adj
            .iter()
            .enumerate()
            .flat_map(|(u, outs)| outs.iter().map(move |&v| (u as VertexId, v)))
    }

    /// Subgraph induced by `subset`, with ids reassigned in ascending order of
    /// the original ids. Labels are carried over.
    pub fn induced_subgraph(&self, subset: &[VertexId]) -> Result<DirectedGraph, GraphError> {
        let mut members: Vec<VertexId> = subset.to_vec();
        members.sort_unstable();
        members.dedup();
        let mut remap = vec![VertexId::MAX; self.n()];
        for (i, &v) in members.iter().enumerate() {
            self.check(v)?;
            remap[v as usize] = i as VertexId;
        }
        let mut sub = DirectedGraph {
            out_adj: vec![Vec::new(); members.len()],
            in_adj: vec![Vec::new(); members.len()],
            m: 0,
            labels: members.iter().map(|&v| self.labels[v as usize].clone()).collect(),
            index: HashMap::with_capacity(members.len()),
        };
        for (i, &v) in members.iter().enumerate() {
            sub.index.insert(self.labels[v as usize].clone(), i as VertexId);
            for &w in self.out_neighbors(v) {
                let j = remap[w as usize];
                if j != VertexId::MAX {
                    sub.out_adj[i].push(j);
                    sub.in_adj[j as usize].push(i as VertexId);
                }
            }
        }
        sub.normalize();
        Ok(sub)
    }

    /// Edge list keyed by labels, sorted. Two graphs with equal canonical
    /// edges and equal label sets are the same graph up to id assignment.
    pub fn canonical_edges(&self) -> Vec<(String, String)> {
        let mut edges: Vec<(String, String)> = self
            .edges()
            .map(|(u, v)| (self.labels[u as usize].clone(), self.labels[v as usize].clone()))
            .collect();
        edges.sort();
        edges
    }

    /// Writes one `u v` line per edge using the original labels.
    pub fn write_edge_list<W: Write>(&self, mut sink: W) -> io::Result<()> {
        for (u, v) in self.edges() {
            writeln!(sink, "{} {}", self.labels[u as usize], self.labels[v as usize])?;
        }
        Ok(())
    }

    /// Registers a new isolated vertex.
    pub fn add_vertex(&mut self, label: &str) -> Result<VertexId, GraphError> {
        if self.index.contains_key(label) {
            return Err(GraphError::DuplicateVertex(label.to_string()));
        }
        let id = self.n() as VertexId;
        self.out_adj.push(Vec::new());
        self.in_adj.push(Vec::new());
        self.labels.push(label.to_string());
        self.index.insert(label.to_string(), id);
        Ok(id)
    }

    /// Adds `u -> v`. Returns `false` for self-loops and existing edges.
    pub fn insert_edge(&mut self, u: VertexId, v: VertexId) -> Result<bool, GraphError> {
        self.check(u)?;
        self.check(v)?;
        if u == v {
            return Ok(false);
        }
        let outs = &mut self.out_adj[u as usize];
        match outs.binary_search(&v) {
            Ok(_) => Ok(false),
            Err(pos) => {
                outs.insert(pos, v);
                let ins = &mut self.in_adj[v as usize];
                let pos = ins.binary_search(&u).unwrap_err();
                ins.insert(pos, u);
                self.m += 1;
                Ok(true)
            }
        }
    }

    /// Removes `u -> v`. Returns `false` if the edge was absent.
    pub fn remove_edge(&mut self, u: VertexId, v: VertexId) -> Result<bool, GraphError> {
        self.check(u)?;
        self.check(v)?;
        let outs = &mut self.out_adj[u as usize];
        match outs.binary_search(&v) {
            Err(_) => Ok(false),
            Ok(pos) => {
                outs.remove(pos);
                let ins = &mut self.in_adj[v as usize];
                let pos = ins.binary_search(&u).expect("in/out adjacency out of sync");
                ins.remove(pos);
                self.m -= 1;
                Ok(true)
            }
        }
    }

    /// Removes an isolated vertex. Ids above `v` shift down by one so the
    /// relative order of the remaining vertices is preserved.
    pub fn remove_isolated_vertex(&mut self, v: VertexId) -> Result<(), GraphError> {
        self.check(v)?;
        assert!(
            self.out_adj[v as usize].is_empty() && self.in_adj[v as usize].is_empty(),
            "vertex {v} still has incident edges"
        );
        self.out_adj.remove(v as usize);
        self.in_adj.remove(v as usize);
        let label = self.labels.remove(v as usize);
        self.index.remove(&label);
        for list in self.out_adj.iter_mut().chain(self.in_adj.iter_mut()) {
            for w in list.iter_mut() {
                if *w > v {
                    *w -= 1;
                }
            }
        }
        for id in self.index.values_mut() {
            if *id > v {
                *id -= 1;
            }
        }
        Ok(())
    }
}

/// Incrementally assembles a graph from labelled edges.
#[derive(Debug, Default)]
pub struct GraphBuilder {
    labels: Vec<String>,
    index: HashMap<String, VertexId>,
    edges: Vec<(VertexId, VertexId)>,
    report: LoadReport,
}

impl GraphBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn intern(&mut self, label: &str) -> VertexId {
        if let Some(&id) = self.index.get(label) {
            return id;
        }
        let id = self.labels.len() as VertexId;
        self.labels.push(label.to_string());
        self.index.insert(label.to_string(), id);
        id
    }

    pub fn add_edge(&mut self, u: &str, v: &str) {
        let u = self.intern(u);
        let v = self.intern(v);
        if u == v {
            self.report.self_loops += 1;
        } else {
            self.edges.push((u, v));
        }
    }

    pub fn finish(self) -> (DirectedGraph, LoadReport) {
        let n = self.labels.len();
        let mut g = DirectedGraph {
            out_adj: vec![Vec::new(); n],
            in_adj: vec![Vec::new(); n],
            m: 0,
            labels: self.labels,
            index: self.index,
        };
        for &(u, v) in &self.edges {
            g.out_adj[u as usize].push(v);
            g.in_adj[v as usize].push(u);
        }
        g.normalize();
        let mut report = self.report;
        report.duplicates = self.edges.len() - g.m;
        (g, report)
    }
}

/// Parses a whitespace-separated `u v` edge list. Lines starting with `#`
/// and blank lines are skipped.
pub fn load_edge_list<R: Read>(source: R) -> Result<(DirectedGraph, LoadReport), ParseError> {
    let reader = BufReader::new(source);
    let mut builder = GraphBuilder::new();
    let mut lines = 0;
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut tokens = trimmed.split_whitespace();
        match (tokens.next(), tokens.next(), tokens.next()) {
            (Some(u), Some(v), None) => builder.add_edge(u, v),
            _ => {
                return Err(ParseError::Malformed {
                    line: i + 1,
                    found: trimmed.split_whitespace().count(),
                })
            }
        }
        lines += 1;
    }
    let (g, mut report) = builder.finish();
    report.lines = lines;
    Ok((g, report))
}

/// Loads an edge list from disk; a `.gz` suffix selects gzip decoding.
pub fn load_edge_list_path<P: AsRef<Path>>(
    path: P,
) -> Result<(DirectedGraph, LoadReport), ParseError> {
    let path = path.as_ref();
    let file = File::open(path)?;
    if path.extension().is_some_and(|ext| ext == "gz") {
        load_edge_list(GzDecoder::new(file))
    } else {
        load_edge_list(file)
    }
}
