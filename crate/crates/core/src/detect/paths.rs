// SPDX-License-Identifier: Apache-2.0

use serde::Serialize;
use std::collections::VecDeque;

use super::{Decision, DetectionResult, TestKind};
use crate::error::{Error, Result};
use crate::graph::{connected_components, Graph};

/// Depth-first expansions allowed per cyclic component.
pub const DEFAULT_PATH_BUDGET: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LongestPath {
    /// Number of vertices on the path.
    pub length: usize,
    pub path: Vec<usize>,
    /// False when some cyclic component ran out of budget; `length` is then
    /// only a lower bound.
    pub exact: bool,
}

/// Longest simple path of the graph.
///
/// Acyclic components are solved exactly with two breadth-first sweeps.
/// Cyclic components are searched exhaustively, seeded with the diameter path
/// of a BFS spanning tree; the search is capped at `budget` expansions per
/// component.
pub fn longest_path(g: &Graph, budget: u64) -> LongestPath {
    let mut best = LongestPath {
        length: 0,
        path: Vec::new(),
        exact: true,
    };
    let mut scratch = Scratch::new(g.n());
    for comp in connected_components(g) {
        if comp.size() <= best.length {
            continue;
        }
        let (path, exact) = if comp.acyclic {
            (tree_diameter_path(g, &comp.vertices, &mut scratch), true)
        } else {
            let seed = tree_diameter_path(g, &comp.vertices, &mut scratch);
            exhaustive_longest(g, &comp.vertices, seed, budget, &mut scratch)
        };
        best.exact &= exact;
        if path.len() > best.length {
            best.length = path.len();
            best.path = path;
        }
    }
    best
}

struct Scratch {
    parent: Vec<u32>,
    on_path: Vec<bool>,
}

impl Scratch {
    fn new(n: usize) -> Self {
        Scratch {
            parent: vec![u32::MAX; n],
            on_path: vec![false; n],
        }
    }
}

/// BFS from `root` over the (spanning) tree induced by first discovery;
/// returns the last vertex reached. Parents are left in `scratch.parent`.
fn bfs_far(g: &Graph, root: usize, scratch: &mut Scratch, touched: &[usize]) -> usize {
    for &v in touched {
        scratch.parent[v] = u32::MAX;
    }
    scratch.parent[root] = root as u32;
    let mut queue = VecDeque::from([root]);
    let mut last = root;
    while let Some(u) = queue.pop_front() {
        last = u;
        for &w in g.neighbors(u) {
            if scratch.parent[w as usize] == u32::MAX {
                scratch.parent[w as usize] = u as u32;
                queue.push_back(w as usize);
            }
        }
    }
    last
}

/// Double sweep. Exact on trees; on a cyclic component it yields the diameter
/// path of one BFS tree, which is still a simple path of `g`.
fn tree_diameter_path(g: &Graph, vertices: &[usize], scratch: &mut Scratch) -> Vec<usize> {
    let start = vertices[0];
    let a = bfs_far(g, start, scratch, vertices);
    let b = bfs_far(g, a, scratch, vertices);
    let mut path = vec![b];
    let mut v = b;
    while v != a {
        v = scratch.parent[v] as usize;
        path.push(v);
    }
    path
}

/// Exhaustive DFS over simple paths from every vertex of the component.
fn exhaustive_longest(
    g: &Graph,
    vertices: &[usize],
    mut best: Vec<usize>,
    budget: u64,
    scratch: &mut Scratch,
) -> (Vec<usize>, bool) {
    let target = vertices.len();
    let mut steps = 0u64;
    let mut path: Vec<usize> = Vec::new();
    // (vertex, index of next neighbor to try)
    let mut stack: Vec<(usize, usize)> = Vec::new();
    for &s in vertices {
        if best.len() == target {
            break;
        }
        path.clear();
        stack.clear();
        path.push(s);
        scratch.on_path[s] = true;
        stack.push((s, 0));
        while let Some(top) = stack.last_mut() {
            let u = top.0;
            let nbrs = g.neighbors(u);
            if top.1 < nbrs.len() {
                let w = nbrs[top.1] as usize;
                top.1 += 1;
                steps += 1;
                if steps > budget {
                    for &v in &path {
                        scratch.on_path[v] = false;
                    }
                    return (best, false);
                }
                if !scratch.on_path[w] {
                    scratch.on_path[w] = true;
                    path.push(w);
                    stack.push((w, 0));
                    if path.len() > best.len() {
                        best = path.clone();
                        if best.len() == target {
                            break;
                        }
                    }
                }
            } else {
                stack.pop();
                scratch.on_path[u] = false;
                path.pop();
            }
        }
        for &v in &path {
            scratch.on_path[v] = false;
        }
    }
    (best, true)
}

/// Rejects the null iff a simple path on `K` vertices exists.
pub fn k_path_test(g: &Graph, k: usize) -> Result<DetectionResult> {
    k_path_test_with_budget(g, k, DEFAULT_PATH_BUDGET)
}

pub fn k_path_test_with_budget(g: &Graph, k: usize, budget: u64) -> Result<DetectionResult> {
    if k < 2 {
        return Err(Error::param("K-path test needs K >= 2"));
    }
    let lp = longest_path(g, budget);
    Ok(
        DetectionResult::new(TestKind::KPath, Decision::from_rejects(lp.length >= k), lp.exact)
            .with("longest_path_len", lp.length as f64)
            .with("threshold", k as f64),
    )
}
