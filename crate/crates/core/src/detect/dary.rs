// SPDX-License-Identifier: Apache-2.0

//! Non-backtracking message passing for complete D-ary subtrees.
//!
//! `msg(u -> v)` is the height of the tallest complete D-ary tree rooted at
//! `u` that avoids the edge back to `v`, as seen on the universal cover. A
//! vertex alone has height 0. On a graph whose relevant neighborhoods are
//! acyclic the cover coincides with the graph and the heights are exact;
//! otherwise they can only overestimate.

use serde::Serialize;

use super::{Decision, DetectionResult, TestKind};
use crate::error::{Error, Result};
use crate::graph::{connected_components, Graph};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DaryHeights {
    /// Certified root height per vertex after the last iteration.
    pub heights: Vec<u32>,
    /// True when every vertex's `h_max`-ball is acyclic.
    pub exact: bool,
    pub iterations: usize,
}

/// D-th largest of `sorted_desc` after removing one occurrence of `skip`.
#[inline]
fn dth_largest_excluding(sorted_desc: &[u32], skip: u32, d: usize) -> Option<u32> {
    if sorted_desc.len() <= d {
        // fewer than D values remain once `skip` is dropped
        return None;
    }
    if skip >= sorted_desc[d - 1] {
        Some(sorted_desc[d])
    } else {
        Some(sorted_desc[d - 1])
    }
}

/// Message passing for `h_max` rounds (stops early at a fixed point).
pub fn dary_height_messages(g: &Graph, d: usize, h_max: usize) -> Result<DaryHeights> {
    if d < 1 {
        return Err(Error::param("D must be at least 1"));
    }
    let (heights, iterations) = run_messages(g, d, h_max);
    let exact = all_balls_acyclic(g, h_max, BALL_BUDGET);
    Ok(DaryHeights {
        heights,
        exact,
        iterations,
    })
}

/// Runs the message updates and returns root heights and rounds used.
fn run_messages(g: &Graph, d: usize, h_max: usize) -> (Vec<u32>, usize) {
    let slots = g.neighbor_slots();
    // rev[s] is the slot of the opposite direction of directed edge s
    let mut rev = vec![0usize; slots.len()];
    for u in 0..g.n() {
        for (i, &v) in g.neighbors(u).iter().enumerate() {
            let j = g
                .neighbors(v as usize)
                .binary_search(&(u as u32))
                .expect("adjacency is symmetric");
            rev[g.offset(u) + i] = g.offset(v as usize) + j;
        }
    }
    // msg[s] for slot s = (u, i) is msg(u -> neighbors(u)[i])
    let mut msg = vec![0u32; slots.len()];
    let mut next = vec![0u32; slots.len()];
    let mut incoming: Vec<u32> = Vec::new();
    let mut iterations = 0;
    for _ in 0..h_max {
        for u in 0..g.n() {
            let base = g.offset(u);
            let deg = g.degree(u);
            if deg < d + 1 {
                // every outgoing message sees at most D-1 children
                next[base..base + deg].fill(0);
                continue;
            }
            incoming.clear();
            incoming.extend((base..base + deg).map(|s| msg[rev[s]]));
            incoming.sort_unstable_by(|a, b| b.cmp(a));
            for s in base..base + deg {
                let skip = msg[rev[s]];
                next[s] = dth_largest_excluding(&incoming, skip, d).map_or(0, |x| x + 1);
            }
        }
        let changed = msg != next;
        std::mem::swap(&mut msg, &mut next);
        iterations += 1;
        if !changed {
            break;
        }
    }
    let heights = (0..g.n())
        .map(|v| {
            let base = g.offset(v);
            let deg = g.degree(v);
            if deg < d {
                return 0;
            }
            incoming.clear();
            incoming.extend((base..base + deg).map(|s| msg[rev[s]]));
            incoming.sort_unstable_by(|a, b| b.cmp(a));
            incoming[d - 1] + 1
        })
        .collect();
    (heights, iterations)
}

const BALL_BUDGET: u64 = 10_000_000;

/// Reusable marker for ball checks.
struct BallScratch {
    stamp: Vec<u32>,
    dist: Vec<u32>,
    current: u32,
    ball: Vec<usize>,
}

impl BallScratch {
    fn new(n: usize) -> Self {
        BallScratch {
            stamp: vec![0; n],
            dist: vec![0; n],
            current: 0,
            ball: Vec::new(),
        }
    }

    /// `Some(acyclic)` or `None` when `budget` runs out.
    fn check(&mut self, g: &Graph, v: usize, radius: usize, budget: &mut u64) -> Option<bool> {
        self.current += 1;
        let c = self.current;
        self.ball.clear();
        self.ball.push(v);
        self.stamp[v] = c;
        self.dist[v] = 0;
        let mut head = 0;
        while head < self.ball.len() {
            let u = self.ball[head];
            head += 1;
            if self.dist[u] as usize == radius {
                continue;
            }
            for &w in g.neighbors(u) {
                *budget = budget.checked_sub(1)?;
                let w = w as usize;
                if self.stamp[w] != c {
                    self.stamp[w] = c;
                    self.dist[w] = self.dist[u] + 1;
                    self.ball.push(w);
                }
            }
        }
        let mut edges = 0usize;
        for &u in &self.ball {
            for &w in g.neighbors(u) {
                *budget = budget.checked_sub(1)?;
                if self.stamp[w as usize] == c && (u as u32) < w {
                    edges += 1;
                }
            }
        }
        Some(edges + 1 == self.ball.len())
    }
}

/// Whether the radius-`radius` ball around `v` induces a tree.
pub fn ball_is_acyclic(g: &Graph, v: usize, radius: usize) -> bool {
    let mut budget = u64::MAX;
    BallScratch::new(g.n()).check(g, v, radius, &mut budget).unwrap_or(false)
}

fn all_balls_acyclic(g: &Graph, radius: usize, mut budget: u64) -> bool {
    let comps = connected_components(g);
    if comps.iter().all(|c| c.acyclic) {
        return true;
    }
    let mut scratch = BallScratch::new(g.n());
    for comp in comps.iter().filter(|c| !c.acyclic) {
        for &v in &comp.vertices {
            match scratch.check(g, v, radius, &mut budget) {
                Some(true) => {}
                _ => return false,
            }
        }
    }
    true
}

/// Rejects the null iff some vertex roots a complete D-ary tree of height
/// `h`, as certified by message passing with `h` rounds.
///
/// `exact` reports whether the decision is certified: an H0 decision always
/// is (message heights never underestimate), an H1 decision is when some
/// vertex of height at least `h` has an acyclic `h`-ball.
pub fn dary_test(g: &Graph, d: usize, h: usize) -> Result<DetectionResult> {
    if d < 2 || h < 1 {
        return Err(Error::param("D-ary test needs D >= 2 and h >= 1"));
    }
    let (heights, _) = run_messages(g, d, h);
    let max_height = heights.iter().copied().max().unwrap_or(0);
    let detected = max_height as usize >= h;
    let mut witness = -1.0;
    let exact = if detected {
        let mut scratch = BallScratch::new(g.n());
        let mut budget = BALL_BUDGET;
        let mut certified = false;
        for (v, &ht) in heights.iter().enumerate() {
            if ht as usize >= h {
                match scratch.check(g, v, h, &mut budget) {
                    Some(true) => {
                        certified = true;
                        witness = v as f64;
                        break;
                    }
                    Some(false) => {}
                    None => break,
                }
            }
        }
        certified
    } else {
        true
    };
    Ok(DetectionResult::new(TestKind::Dary, Decision::from_rejects(detected), exact)
        .with("max_dheight", max_height as f64)
        .with("threshold", h as f64)
        .with("witness", witness))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::plant::{plant, PlantSpec};

    #[test]
    fn binary_tree_heights() {
        let t = PlantSpec::DaryTree { d: 2, h: 2 }.template();
        let r = dary_height_messages(&t, 2, 3).unwrap();
        assert_eq!(r.heights[0], 2);
        assert!(r.heights[1] >= 1 && r.heights[2] >= 1);
        for leaf in 3..7 {
            assert_eq!(r.heights[leaf], 0);
        }
        assert!(r.exact);
    }

    #[test]
    fn triangle_heights() {
        let r = dary_height_messages(&Graph::cycle(3), 2, 1).unwrap();
        assert!(r.heights.iter().all(|&h| h >= 1));
        assert!(!r.exact);
    }

    #[test]
    fn dary_test_examples() {
        let inst = plant(&Graph::empty(20), PlantSpec::DaryTree { d: 2, h: 3 }, 4).unwrap();
        let r = dary_test(&inst.graph, 2, 3).unwrap();
        assert_eq!(r.decision, Decision::H1);
        assert!(r.exact);
        let r = dary_test(&Graph::empty(5), 2, 1).unwrap();
        assert_eq!(r.decision, Decision::H0);
        assert!(dary_test(&Graph::empty(5), 1, 1).is_err());
    }

    #[test]
    fn ball_checks() {
        let g = Graph::from_edges(7, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 2)]).unwrap();
        assert!(ball_is_acyclic(&g, 0, 1));
        assert!(!ball_is_acyclic(&g, 0, 4));
        assert!(ball_is_acyclic(&g, 6, 5));
    }
}
