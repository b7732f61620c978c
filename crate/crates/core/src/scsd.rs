//! Strongly connected community search: start from the minimum-degree
//! community, then alternate SCC extraction and re-peeling until the SCC of
//! `q` meets both degree bounds.

use std::time::Instant;

use crate::decomp::Scratch;
use crate::error::GraphError;
use crate::graph::{DirectedGraph, VertexId};
use crate::index::{CommunityResult, DForest};

const OUTSIDE: u8 = 0;
const FRESH: u8 = 1;
const FINISHED: u8 = 2;
const ASSIGNED: u8 = 3;

/// Strongly connected component of `q` inside the subgraph induced by `set`,
/// by Kosaraju's two passes with explicit stacks.
pub fn scc_of(g: &DirectedGraph, set: &[VertexId], q: VertexId) -> Result<Vec<VertexId>, GraphError> {
    g.check(q)?;
    let mut state = vec![OUTSIDE; g.n()];
    for &v in set {
        state[v as usize] = FRESH;
    }
    if state[q as usize] != FRESH {
        return Err(GraphError::NotInSet(q));
    }

    // pass 1: finish order over out-edges
    let mut order: Vec<VertexId> = Vec::with_capacity(set.len());
    let mut stack: Vec<(VertexId, usize)> = Vec::new();
    for &s in set {
        if state[s as usize] != FRESH {
            continue;
        }
        state[s as usize] = FINISHED;
        stack.push((s, 0));
        while let Some(top) = stack.last_mut() {
            let (v, i) = *top;
            let outs = g.out_neighbors(v);
            if i < outs.len() {
                top.1 += 1;
                let w = outs[i];
                if state[w as usize] == FRESH {
                    state[w as usize] = FINISHED;
                    stack.push((w, 0));
                }
            } else {
                stack.pop();
                order.push(v);
            }
        }
    }

    // pass 2: reverse finish order over in-edges; components come out one at a time
    let mut comp: Vec<VertexId> = Vec::new();
    let mut todo: Vec<VertexId> = Vec::new();
    for &s in order.iter().rev() {
        if state[s as usize] != FINISHED {
            continue;
        }
        comp.clear();
        state[s as usize] = ASSIGNED;
        todo.push(s);
        while let Some(v) = todo.pop() {
            comp.push(v);
            for &w in g.in_neighbors(v) {
                if state[w as usize] == FINISHED {
                    state[w as usize] = ASSIGNED;
                    todo.push(w);
                }
            }
        }
        if comp.contains(&q) {
            comp.sort_unstable();
            return Ok(comp);
        }
    }
    unreachable!("q was in the working set")
}

fn feasible(g: &DirectedGraph, set: &[VertexId], inside: &mut [bool], k: usize, l: usize) -> bool {
    for &v in set {
        inside[v as usize] = true;
    }
    let ok = set.iter().all(|&v| {
        let i = g.in_neighbors(v).iter().filter(|&&u| inside[u as usize]).count();
        let o = g.out_neighbors(v).iter().filter(|&&u| inside[u as usize]).count();
        i >= k && o >= l
    });
    for &v in set {
        inside[v as usize] = false;
    }
    ok
}

/// Strongly connected, degree-feasible community of `q`, or empty.
pub fn query_scsd(
    g: &DirectedGraph,
    f: &DForest,
    q: VertexId,
    k: usize,
    l: usize,
) -> Result<CommunityResult, GraphError> {
    let start = Instant::now();
    let csd = f.query_csd(q, k, l)?;
    let mut working = csd.sorted();
    let mut scratch = Scratch::new(g.n());
    let mut inside = vec![false; g.n()];
    let vertices = loop {
        if working.is_empty() {
            break Vec::new();
        }
        let scc = scc_of(g, &working, q)?;
        if feasible(g, &scc, &mut inside, k, l) {
            break scc;
        }
        let core = scratch.peel(g, &scc, k, l);
        working = scratch.component_of(g, &core, q);
    };
    Ok(CommunityResult {
        vertices,
        nodes_visited: csd.nodes_visited,
        elapsed: start.elapsed(),
    })
}

pub fn query_scsd_label(
    g: &DirectedGraph,
    f: &DForest,
    label: &str,
    k: usize,
    l: usize,
) -> Result<CommunityResult, GraphError> {
    query_scsd(g, f, f.vertex(label)?, k, l)
}
