// SPDX-License-Identifier: Apache-2.0

//! Immutable sparse undirected simple graphs.

use rand::Rng as _;
use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::rng::rng_from_seed;

/// Undirected simple graph over vertices `0..n`.
///
/// Edges are kept as a sorted list of `(u, v)` pairs with `u < v`, plus a
/// compressed adjacency structure with sorted neighbor lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<(u32, u32)>,
    offsets: Vec<usize>,
    neighbors: Vec<u32>,
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        Self::from_sorted_unique(n, Vec::new())
    }

    /// Build from an edge list, rejecting self-loops, duplicates and
    /// out-of-range endpoints. Pairs may be given in either orientation.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut list = Vec::new();
        for (a, b) in edges {
            if a >= n || b >= n {
                return Err(Error::param(format!("edge ({a}, {b}) out of range for n = {n}")));
            }
            if a == b {
                return Err(Error::param(format!("self-loop at vertex {a}")));
            }
            let (u, v) = if a < b { (a, b) } else { (b, a) };
            list.push((u as u32, v as u32));
        }
        list.sort_unstable();
        if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::param(format!("duplicate edge ({}, {})", w[0].0, w[0].1)));
        }
        Ok(Self::from_sorted_unique(n, list))
    }

    /// Like [`Graph::from_edges`] but silently merges duplicates.
    pub fn from_edges_dedup(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut list = Vec::new();
        for (a, b) in edges {
            if a >= n || b >= n || a == b {
                return Err(Error::param(format!("invalid edge ({a}, {b}) for n = {n}")));
            }
            let (u, v) = if a < b { (a, b) } else { (b, a) };
            list.push((u as u32, v as u32));
        }
        list.sort_unstable();
        list.dedup();
        Ok(Self::from_sorted_unique(n, list))
    }

    fn from_sorted_unique(n: usize, edges: Vec<(u32, u32)>) -> Self {
        assert!(n <= u32::MAX as usize, "vertex count exceeds u32 range");
        let mut degree = vec![0usize; n];
        for &(u, v) in &edges {
            degree[u as usize] += 1;
            degree[v as usize] += 1;
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut fill = offsets[..n].to_vec();
        let mut neighbors = vec![0u32; 2 * edges.len()];
        // edges are sorted by (u, v), so pushing v into adj(u) keeps it sorted;
        // adj(v) receives u in increasing u order as well.
        for &(u, v) in &edges {
            neighbors[fill[u as usize]] = v;
            fill[u as usize] += 1;
            neighbors[fill[v as usize]] = u;
            fill[v as usize] += 1;
        }
        for v in 0..n {
            neighbors[offsets[v]..offsets[v + 1]].sort_unstable();
        }
        Graph {
            n,
            edges,
            offsets,
            neighbors,
        }
    }

    /// Complete graph on `n` vertices.
    pub fn complete(n: usize) -> Self {
        let mut edges = Vec::with_capacity(n * n.saturating_sub(1) / 2);
        for u in 0..n as u32 {
            for v in u + 1..n as u32 {
                edges.push((u, v));
            }
        }
        Self::from_sorted_unique(n, edges)
    }

    /// Path `0 - 1 - ... - (k-1)` inside a graph on `n >= k` vertices.
    pub fn path(n: usize, k: usize) -> Self {
        assert!(k <= n);
        let edges = (1..k).map(|i| ((i - 1) as u32, i as u32)).collect();
        Self::from_sorted_unique(n, edges)
    }

    /// Cycle on vertices `0..n`.
    pub fn cycle(n: usize) -> Self {
        assert!(n >= 3);
        Self::from_edges(n, (0..n).map(|i| (i, (i + 1) % n))).unwrap()
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Sorted `(u, v)` pairs with `u < v`.
    pub fn edges(&self) -> impl ExactSizeIterator<Item = (usize, usize)> + '_ {
        self.edges.iter().map(|&(u, v)| (u as usize, v as usize))
    }

    pub(crate) fn raw_edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    #[inline]
    pub fn neighbors(&self, v: usize) -> &[u32] {
        &self.neighbors[self.offsets[v]..self.offsets[v + 1]]
    }

    #[inline]
    pub fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        if u >= self.n || v >= self.n {
            return false;
        }
        let (a, b) = if self.degree(u) <= self.degree(v) { (u, v) } else { (v, u) };
        self.neighbors(a).binary_search(&(b as u32)).is_ok()
    }

    /// Offset of vertex `v`'s first neighbor slot; directed edge ids are
    /// `offset(v) + i` for the i-th neighbor of `v`.
    #[inline]
    pub(crate) fn offset(&self, v: usize) -> usize {
        self.offsets[v]
    }

    pub(crate) fn neighbor_slots(&self) -> &[u32] {
        &self.neighbors
    }

    pub fn max_degree(&self) -> Option<(usize, usize)> {
        // lowest index wins ties
        (0..self.n).map(|v| (self.degree(v), v)).fold(None, |best, (d, v)| match best {
            Some((bd, _)) if bd >= d => best,
            _ => Some((d, v)),
        })
    }

    /// Union of this graph with extra edges (duplicates merged).
    pub fn union_with(&self, extra: &[(usize, usize)]) -> Result<Self> {
        Self::from_edges_dedup(self.n, self.edges().chain(extra.iter().copied()))
    }

    /// Graph with the given edges removed (edges not present are ignored).
    pub fn without_edges(&self, remove: &[(usize, usize)]) -> Self {
        let mut drop: Vec<(u32, u32)> = remove
            .iter()
            .map(|&(a, b)| if a < b { (a as u32, b as u32) } else { (b as u32, a as u32) })
            .collect();
        drop.sort_unstable();
        let edges = self
            .edges
            .iter()
            .copied()
            .filter(|e| drop.binary_search(e).is_err())
            .collect();
        Self::from_sorted_unique(self.n, edges)
    }

    /// Apply a vertex permutation: vertex `v` becomes `perm[v]`.
    pub fn relabel(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.n {
            return Err(Error::param("permutation length differs from n"));
        }
        Self::from_edges(self.n, self.edges().map(|(u, v)| (perm[u], perm[v])))
    }
}

/// Sample G(n, lambda/n) by geometric skipping.
///
/// Candidate pairs are visited in the order `(0,1), (0,2), (1,2), (0,3), ...`
/// (by larger endpoint, then smaller); each step draws one `f64` uniform `r`
/// from the crate generator and skips `floor(ln(1 - r) / ln(1 - p))` pairs.
/// Expected running time is `O(n + lambda * n)`.
pub fn sample_er(n: usize, lambda: f64, seed: u64) -> Result<Graph> {
    if !(lambda >= 0.0) || !lambda.is_finite() {
        return Err(Error::param(format!("lambda must be a finite non-negative real, got {lambda}")));
    }
    let p = if n == 0 { 0.0 } else { lambda / n as f64 };
    if p > 1.0 {
        return Err(Error::InvalidProbability { lambda, n, p });
    }
    if n < 2 || p == 0.0 {
        return Ok(Graph::empty(n));
    }
    if p == 1.0 {
        return Ok(Graph::complete(n));
    }
    let mut rng = rng_from_seed(seed);
    let log_q = (-p).ln_1p();
    let expected = (lambda * (n - 1) as f64 / 2.0) as usize;
    let mut edges = Vec::with_capacity(expected + expected / 8 + 16);
    let mut v: usize = 1;
    let mut w: i64 = -1;
    while v < n {
        let r: f64 = rng.random();
        let skip = ((-r).ln_1p() / log_q).floor();
        // an astronomically long skip simply ends the scan
        if skip >= (n as f64) * (n as f64) {
            break;
        }
        w += 1 + skip as i64;
        while w >= v as i64 && v < n {
            w -= v as i64;
            v += 1;
        }
        if v < n {
            edges.push((w as u32, v as u32));
        }
    }
    edges.sort_unstable();
    Ok(Graph::from_sorted_unique(n, edges))
}

/// One connected component.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Component {
    /// Sorted vertex list.
    pub vertices: Vec<usize>,
    pub edge_count: usize,
    /// `edge_count == vertices.len() - 1`.
    pub acyclic: bool,
}

impl Component {
    pub fn size(&self) -> usize {
        self.vertices.len()
    }
}

/// Connected components, ordered by their smallest vertex.
pub fn connected_components(g: &Graph) -> Vec<Component> {
    let labels = component_labels(g);
    let count = labels.iter().map(|&l| l + 1).max().unwrap_or(0);
    let mut comps: Vec<Component> = (0..count)
        .map(|_| Component {
            vertices: Vec::new(),
            edge_count: 0,
            acyclic: true,
        })
        .collect();
    for v in 0..g.n() {
        comps[labels[v]].vertices.push(v);
    }
    for &(u, _) in g.raw_edges() {
        comps[labels[u as usize]].edge_count += 1;
    }
    for c in &mut comps {
        c.acyclic = c.edge_count + 1 == c.vertices.len();
    }
    comps
}

/// Component label per vertex; labels are assigned in order of the
/// smallest vertex of each component.
pub fn component_labels(g: &Graph) -> Vec<usize> {
    const UNSEEN: usize = usize::MAX;
    let mut label = vec![UNSEEN; g.n()];
    let mut queue = VecDeque::new();
    let mut next = 0;
    for s in 0..g.n() {
        if label[s] != UNSEEN {
            continue;
        }
        label[s] = next;
        queue.push_back(s);
        while let Some(u) = queue.pop_front() {
            for &w in g.neighbors(u) {
                let w = w as usize;
                if label[w] == UNSEEN {
                    label[w] = next;
                    queue.push_back(w);
                }
            }
        }
        next += 1;
    }
    label
}

/// Breadth-first distances from a set of sources, restricted to vertices for
/// which `allowed` returns true. Unreached vertices get `usize::MAX`.
pub(crate) fn bfs_distances(g: &Graph, sources: &[usize], allowed: impl Fn(usize) -> bool) -> Vec<usize> {
    let mut dist = vec![usize::MAX; g.n()];
    let mut queue = VecDeque::new();
    for &s in sources {
        if dist[s] == usize::MAX && allowed(s) {
            dist[s] = 0;
            queue.push_back(s);
        }
    }
    while let Some(u) = queue.pop_front() {
        for &w in g.neighbors(u) {
            let w = w as usize;
            if dist[w] == usize::MAX && allowed(w) {
                dist[w] = dist[u] + 1;
                queue.push_back(w);
            }
        }
    }
    dist
}
