//! (k,l)-core peeling, per-k level decomposition and weak connectivity.
//!
//! A vertex belongs to the (k,l)-core when, inside the largest subgraph where
//! every member keeps in-degree >= k and out-degree >= l, it survives. All
//! vertex sets returned here are sorted ascending.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::{DirectedGraph, VertexId};

/// Per-vertex maximum `l` for a fixed `k`. `-1` marks vertices outside the (k,0)-core.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoreLevels {
    pub k: usize,
    pub maxl: Vec<i32>,
    pub lmax: i32,
}

impl CoreLevels {
    #[inline]
    pub fn get(&self, v: VertexId) -> i32 {
        self.maxl[v as usize]
    }

    pub fn len(&self) -> usize {
        self.maxl.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lmax < 0
    }

    /// Members of the (k,l)-core.
    pub fn core(&self, l: i32) -> Vec<VertexId> {
        self.maxl
            .iter()
            .enumerate()
            .filter(|&(_, &x)| x >= l && x >= 0)
            .map(|(v, _)| v as VertexId)
            .collect()
    }
}

/// Reusable scratch space for peeling and component search restricted to a
/// vertex subset. Membership uses epoch stamps so each call costs only the
/// size of the subset and its incident edges.
#[derive(Debug, Default)]
pub struct Scratch {
    stamp: Vec<u32>,
    epoch: u32,
    indeg: Vec<u32>,
    outdeg: Vec<u32>,
    stack: Vec<VertexId>,
    /// Adjacency entries inspected so far.
    pub touches: u64,
}

impl Scratch {
    pub fn new(n: usize) -> Self {
        Scratch {
            stamp: vec![0; n],
            epoch: 0,
            indeg: vec![0; n],
            outdeg: vec![0; n],
            stack: Vec::new(),
            touches: 0,
        }
    }

    fn ensure(&mut self, n: usize) {
        if self.stamp.len() < n {
            self.stamp.resize(n, 0);
            self.indeg.resize(n, 0);
            self.outdeg.resize(n, 0);
        }
    }

    fn next_epoch(&mut self) -> u32 {
        if self.epoch >= u32::MAX - 1 {
            self.stamp.iter_mut().for_each(|s| *s = 0);
            self.epoch = 0;
        }
        self.epoch += 1;
        self.epoch
    }

    /// Peels `members` down to the (k,l)-core of the subgraph they induce.
    pub fn peel(
        &mut self,
        g: &DirectedGraph,
        members: &[VertexId],
        k: usize,
        l: usize,
    ) -> Vec<VertexId> {
        self.ensure(g.n());
        let live = self.next_epoch();
        const DEAD: u32 = 0;
        for &v in members {
            self.stamp[v as usize] = live;
        }
        self.stack.clear();
        for &v in members {
            let ins = g.in_neighbors(v);
            let outs = g.out_neighbors(v);
            self.touches += (ins.len() + outs.len()) as u64;
            let i = ins.iter().filter(|&&u| self.stamp[u as usize] == live).count() as u32;
            let o = outs.iter().filter(|&&u| self.stamp[u as usize] == live).count() as u32;
            self.indeg[v as usize] = i;
            self.outdeg[v as usize] = o;
        }
        for &v in members {
            if (self.indeg[v as usize] as usize) < k || (self.outdeg[v as usize] as usize) < l {
                self.stamp[v as usize] = DEAD;
                self.stack.push(v);
            }
        }
        while let Some(v) = self.stack.pop() {
            let outs = g.out_neighbors(v);
            let ins = g.in_neighbors(v);
            self.touches += (ins.len() + outs.len()) as u64;
            for &w in outs {
                if self.stamp[w as usize] == live {
                    self.indeg[w as usize] -= 1;
                    if (self.indeg[w as usize] as usize) < k {
                        self.stamp[w as usize] = DEAD;
                        self.stack.push(w);
                    }
                }
            }
            for &w in ins {
                if self.stamp[w as usize] == live {
                    self.outdeg[w as usize] -= 1;
                    if (self.outdeg[w as usize] as usize) < l {
                        self.stamp[w as usize] = DEAD;
                        self.stack.push(w);
                    }
                }
            }
        }
        let mut core: Vec<VertexId> = members
            .iter()
            .copied()
            .filter(|&v| self.stamp[v as usize] == live)
            .collect();
        core.sort_unstable();
        core
    }

    /// Weakly connected components of the subgraph induced by `members`.
    /// Each component is sorted; components are ordered by their smallest vertex.
    pub fn components(&mut self, g: &DirectedGraph, members: &[VertexId]) -> Vec<Vec<VertexId>> {
        self.ensure(g.n());
        let live = self.next_epoch();
        let seen = self.next_epoch();
        for &v in members {
            self.stamp[v as usize] = live;
        }
        let mut sorted = members.to_vec();
        sorted.sort_unstable();
        let mut comps = Vec::new();
        for &s in &sorted {
            if self.stamp[s as usize] != live {
                continue;
            }
            let comp = self.flood(g, s, live, seen);
            comps.push(comp);
        }
        comps
    }

    /// The weak component of `q` inside `members`; empty if `q` is not a member.
    pub fn component_of(
        &mut self,
        g: &DirectedGraph,
        members: &[VertexId],
        q: VertexId,
    ) -> Vec<VertexId> {
        self.ensure(g.n());
        let live = self.next_epoch();
        let seen = self.next_epoch();
        for &v in members {
            self.stamp[v as usize] = live;
        }
        if self.stamp[q as usize] != live {
            return Vec::new();
        }
        self.flood(g, q, live, seen)
    }

    fn flood(&mut self, g: &DirectedGraph, s: VertexId, live: u32, seen: u32) -> Vec<VertexId> {
        let mut comp = vec![s];
        self.stamp[s as usize] = seen;
        let mut head = 0;
        while head < comp.len() {
            let v = comp[head];
            head += 1;
            self.touches += (g.out_degree(v) + g.in_degree(v)) as u64;
            for w in g.undirected_neighbors(v) {
                if self.stamp[w as usize] == live {
                    self.stamp[w as usize] = seen;
                    comp.push(w);
                }
            }
        }
        comp.sort_unstable();
        comp
    }
}

/// The (k,l)-core of `g`, possibly empty and possibly disconnected.
pub fn kl_core(g: &DirectedGraph, k: usize, l: usize) -> Vec<VertexId> {
    let all: Vec<VertexId> = g.vertices().collect();
    Scratch::new(g.n()).peel(g, &all, k, l)
}

/// The (k,l)-core of the subgraph induced by `members`.
pub fn kl_core_within(g: &DirectedGraph, members: &[VertexId], k: usize, l: usize) -> Vec<VertexId> {
    Scratch::new(g.n()).peel(g, members, k, l)
}

pub fn weak_components(g: &DirectedGraph, members: &[VertexId]) -> Vec<Vec<VertexId>> {
    Scratch::new(g.n()).components(g, members)
}

/// Index-free community search: the weak component of `q` inside the
/// (k,l)-core, or empty when `q` is peeled away.
pub fn online_csd(g: &DirectedGraph, q: VertexId, k: usize, l: usize) -> Vec<VertexId> {
    let mut scratch = Scratch::new(g.n());
    let all: Vec<VertexId> = g.vertices().collect();
    let core = scratch.peel(g, &all, k, l);
    if core.binary_search(&q).is_err() {
        return Vec::new();
    }
    scratch.component_of(g, &core, q)
}

/// Max `l` per vertex for fixed `k`, in O(n + m).
///
/// First peels to the (k,0)-core on in-degree, then repeatedly removes a
/// vertex of minimum remaining out-degree. A removal can push an
/// out-neighbor's in-degree below `k`; that neighbor is removed at once and
/// inherits the current level.
pub fn decompose_for_k(g: &DirectedGraph, k: usize) -> CoreLevels {
    let n = g.n();
    let mut maxl = vec![-1i32; n];
    let mut alive = vec![true; n];
    let mut indeg: Vec<usize> = g.vertices().map(|v| g.in_degree(v)).collect();
    let mut stack: Vec<VertexId> = g.vertices().filter(|&v| indeg[v as usize] < k).collect();
    for &v in &stack {
        alive[v as usize] = false;
    }
    while let Some(v) = stack.pop() {
        for &w in g.out_neighbors(v) {
            if alive[w as usize] {
                indeg[w as usize] -= 1;
                if indeg[w as usize] < k {
                    alive[w as usize] = false;
                    stack.push(w);
                }
            }
        }
    }

    let mut outdeg = vec![0usize; n];
    let mut max_out = 0;
    for v in g.vertices() {
        if alive[v as usize] {
            let d = g.out_neighbors(v).iter().filter(|&&w| alive[w as usize]).count();
            outdeg[v as usize] = d;
            max_out = max_out.max(d);
        }
    }
    let mut buckets: Vec<Vec<VertexId>> = vec![Vec::new(); max_out + 1];
    for v in g.vertices().rev() {
        if alive[v as usize] {
            buckets[outdeg[v as usize]].push(v);
        }
    }

    let mut level = 0usize;
    let mut lmax = -1i32;
    let mut cursor = 0usize;
    while cursor < buckets.len() {
        let Some(v) = buckets[cursor].pop() else {
            cursor += 1;
            continue;
        };
        if !alive[v as usize] || outdeg[v as usize].max(level) != cursor {
            continue;
        }
        level = cursor;
        alive[v as usize] = false;
        maxl[v as usize] = level as i32;
        lmax = lmax.max(level as i32);
        stack.push(v);
        while let Some(x) = stack.pop() {
            for &w in g.out_neighbors(x) {
                if alive[w as usize] {
                    indeg[w as usize] -= 1;
                    if indeg[w as usize] < k {
                        alive[w as usize] = false;
                        maxl[w as usize] = level as i32;
                        stack.push(w);
                    }
                }
            }
            for &w in g.in_neighbors(x) {
                if alive[w as usize] {
                    outdeg[w as usize] -= 1;
                    let key = outdeg[w as usize].max(level);
                    buckets[key].push(w);
                }
            }
        }
    }
    CoreLevels { k, maxl, lmax }
}

/// Largest `k` such that `v` is in the (k,0)-core, or `-1` for no `k`
/// (never the case for an existing vertex, since the (0,0)-core is `V`).
pub fn in_core_numbers(g: &DirectedGraph) -> Vec<i32> {
    let n = g.n();
    let mut deg: Vec<usize> = g.vertices().map(|v| g.in_degree(v)).collect();
    let max_deg = deg.iter().copied().max().unwrap_or(0);
    let mut buckets: Vec<Vec<VertexId>> = vec![Vec::new(); max_deg + 1];
    for v in g.vertices() {
        buckets[deg[v as usize]].push(v);
    }
    let mut core = vec![-1i32; n];
    let mut level = 0;
    let mut cursor = 0;
    while cursor < buckets.len() {
        let Some(v) = buckets[cursor].pop() else {
            cursor += 1;
            continue;
        };
        if core[v as usize] >= 0 || deg[v as usize].max(level) != cursor {
            continue;
        }
        level = cursor;
        core[v as usize] = level as i32;
        for &w in g.out_neighbors(v) {
            if core[w as usize] < 0 {
                deg[w as usize] -= 1;
                buckets[deg[w as usize].max(level)].push(w);
            }
        }
    }
    core
}

/// Largest `k` with a nonempty (k,0)-core; `-1` for the empty graph.
pub fn max_k(g: &DirectedGraph) -> i32 {
    in_core_numbers(g).into_iter().max().unwrap_or(-1)
}

/// Splits the (k,0)-core into `V_0..=V_lmax` by exact level.
pub fn group_by_level(levels: &CoreLevels) -> Vec<Vec<VertexId>> {
    if levels.lmax < 0 {
        return Vec::new();
    }
    let mut groups = vec![Vec::new(); levels.lmax as usize + 1];
    for (v, &l) in levels.maxl.iter().enumerate() {
        if l >= 0 {
            groups[l as usize].push(v as VertexId);
        }
    }
    groups
}

/// Upper bound on `kmax` and every `lmax` for a graph with `m` edges:
/// a (k,l)-core with k >= 1 needs at least k+1 vertices and k(k+1) edges.
pub fn degeneracy_bound(m: usize) -> f64 {
    (((4 * m + 1) as f64).sqrt() - 1.0) / 2.0
}

/// Seeded query workload: `count` vertices drawn uniformly from the
/// (k,k)-core, without replacement while the core is large enough. If that
/// core is empty the largest nonempty (j,j)-core with `j < k` is used
/// instead; the returned threshold says which.
pub fn sample_core_vertices(g: &DirectedGraph, k: usize, count: usize, seed: u64) -> (usize, Vec<VertexId>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for j in (0..=k).rev() {
        let core = kl_core(g, j, j);
        if core.is_empty() {
            continue;
        }
        let picks = if count <= core.len() {
            sample(&mut rng, core.len(), count).into_iter().map(|i| core[i]).collect()
        } else {
            (0..count).map(|_| core[rng.gen_range(0..core.len())]).collect()
        };
        return (j, picks);
    }
    (0, Vec::new())
}
