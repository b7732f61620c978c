//! Core-based union-find.
//!
//! A union-by-rank / path-compression forest where every entry additionally
//! carries `hook` (on a root: a vertex of minimal level in the component, so
//! the vertex→node map of that vertex names the subtree root) and `group` (a
//! component label remembered from the previous, larger `k`).
//!
//! The live label of a set is kept on its root in `label`, separate from the
//! per-vertex `group`. A vertex that is a root while its level is finalized
//! can keep winning unions at lower levels; if those unions rewrote `group`
//! directly, the remembered label would drift to a neighboring component.

use crate::decomp::CoreLevels;
use crate::graph::VertexId;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CufEntry {
    pub rank: u32,
    pub parent: VertexId,
    pub hook: VertexId,
    pub group: VertexId,
    /// Component label while this entry is a root.
    pub label: VertexId,
}

/// Per-vertex union-find entries. Entries are created lazily by [`make_set`]
/// and survive across `k` iterations so `group` can be reused.
///
/// [`make_set`]: CufState::make_set
#[derive(Debug, Clone)]
pub struct CufState {
    entries: Vec<CufEntry>,
    /// Parent-pointer hops taken by `find`, for cost accounting.
    pub chain_steps: u64,
    /// `find` and `union` calls so far.
    pub operations: u64,
}

impl CufState {
    pub fn new(n: usize) -> Self {
        CufState {
            entries: (0..n as VertexId)
                .map(|v| CufEntry {
                    rank: 0,
                    parent: v,
                    hook: v,
                    group: v,
                    label: v,
                })
                .collect(),
            chain_steps: 0,
            operations: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    #[inline]
    pub fn entry(&self, v: VertexId) -> &CufEntry {
        &self.entries[v as usize]
    }

    pub fn make_set(&mut self, v: VertexId) {
        self.entries[v as usize] = CufEntry {
            rank: 0,
            parent: v,
            hook: v,
            group: v,
            label: v,
        };
    }

    /// Makes `v` a singleton root again but keeps its `group`.
    pub fn quick_reset(&mut self, v: VertexId) {
        let e = &mut self.entries[v as usize];
        e.parent = v;
        e.hook = v;
        e.rank = 0;
        e.label = v;
    }

    /// Root of `v`'s set, compressing the path in a second pass.
    pub fn find(&mut self, v: VertexId) -> VertexId {
        self.operations += 1;
        self.find_root(v)
    }

    fn find_root(&mut self, v: VertexId) -> VertexId {
        let mut root = v;
        loop {
            let p = self.entries[root as usize].parent;
            if p == root {
                break;
            }
            root = p;
            self.chain_steps += 1;
        }
        let mut x = v;
        while x != root {
            let next = self.entries[x as usize].parent;
            self.entries[x as usize].parent = root;
            x = next;
        }
        root
    }

    /// Merges the sets of `u` and `v`. The surviving root adopts the losing
    /// root's label when that label vertex sits strictly deeper in `cur`.
    pub fn union(&mut self, u: VertexId, v: VertexId, cur: &CoreLevels) {
        self.operations += 1;
        let mut ru = self.find_root(u);
        let mut rv = self.find_root(v);
        if ru == rv {
            return;
        }
        if self.entries[ru as usize].rank < self.entries[rv as usize].rank {
            std::mem::swap(&mut ru, &mut rv);
        }
        self.entries[rv as usize].parent = ru;
        if self.entries[ru as usize].rank == self.entries[rv as usize].rank {
            self.entries[ru as usize].rank += 1;
        }
        let gu = self.entries[ru as usize].label;
        let gv = self.entries[rv as usize].label;
        if cur.get(gu) < cur.get(gv) {
            self.entries[ru as usize].label = gv;
        }
    }

    /// Records the root's label as each member's group and points the root's
    /// hook at a member of minimal level.
    pub fn update(&mut self, members: &[VertexId], cur: &CoreLevels) {
        for &v in members {
            let r = self.find(v);
            let label = self.entries[r as usize].label;
            self.entries[v as usize].group = label;
            let hook = self.entries[r as usize].hook;
            if cur.get(hook) > cur.get(v) {
                self.entries[r as usize].hook = v;
            }
        }
    }

    /// Longest parent chain from `v` to its root, without compressing.
    pub fn depth(&self, v: VertexId) -> usize {
        let mut d = 0;
        let mut x = v;
        while self.entries[x as usize].parent != x {
            x = self.entries[x as usize].parent;
            d += 1;
        }
        d
    }
}
