// SPDX-License-Identifier: Apache-2.0

//! Recovering the planted vertex set.

use rand::seq::index;
use serde::Serialize;
use std::collections::BTreeMap;

use crate::detect::{longest_path, DEFAULT_PATH_BUDGET};
use crate::error::{Error, Result};
use crate::graph::{bfs_distances, component_labels, Graph};
use crate::rng::rng_from_seed;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReconstructionResult {
    /// Sorted estimate of the planted vertex set.
    pub estimated: Vec<usize>,
    /// `|estimated ∩ truth|` when the truth is known.
    pub overlap: Option<usize>,
    pub method: String,
    pub diagnostics: BTreeMap<String, f64>,
}

impl ReconstructionResult {
    /// Fill in `overlap` against a known planted set.
    pub fn scored(mut self, truth: &[usize]) -> Self {
        self.overlap = Some(overlap(&self.estimated, truth));
        self
    }
}

/// Size of the intersection of two vertex sets.
pub fn overlap(estimated: &[usize], truth: &[usize]) -> usize {
    let mut a = estimated.to_vec();
    let mut b = truth.to_vec();
    a.sort_unstable();
    a.dedup();
    b.sort_unstable();
    b.dedup();
    let (mut i, mut j, mut count) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                count += 1;
                i += 1;
                j += 1;
            }
        }
    }
    count
}

/// Repeatedly strip vertices of degree at most one within the induced
/// subgraph on `vertices`. Each round computes its removal set before
/// removing anything. Returns the sorted survivors.
pub fn peel(vertices: &[usize], g: &Graph, rounds: usize) -> Vec<usize> {
    let mut alive: BTreeMap<usize, usize> = BTreeMap::new();
    for &v in vertices {
        alive.insert(v, 0);
    }
    for v in alive.keys().copied().collect::<Vec<_>>() {
        let d = g.neighbors(v).iter().filter(|&&w| alive.contains_key(&(w as usize))).count();
        alive.insert(v, d);
    }
    for _ in 0..rounds {
        let doomed: Vec<usize> = alive.iter().filter(|(_, &d)| d <= 1).map(|(&v, _)| v).collect();
        if doomed.is_empty() {
            break;
        }
        for &v in &doomed {
            alive.remove(&v);
        }
        for &v in &doomed {
            for &w in g.neighbors(v) {
                if let Some(d) = alive.get_mut(&(w as usize)) {
                    *d -= 1;
                }
            }
        }
    }
    alive.into_keys().collect()
}

/// Longest-path-then-peel reconstruction of a planted line on `K` vertices.
///
/// Takes the component holding the longest path, peels it `ceil(sqrt(K))`
/// rounds, then trims or pads to exactly `K` vertices. Trimming keeps the
/// vertices nearest (in the component) to the middle of the surviving part
/// of the longest path. Padding first walks outward along the longest path
/// from that middle, then takes component vertices by distance to the
/// current estimate, then the lowest-index unused vertices.
pub fn reconstruct_line(g: &Graph, k: usize) -> Result<ReconstructionResult> {
    if k < 2 {
        return Err(Error::param("line reconstruction needs K >= 2"));
    }
    if k > g.n() {
        return Err(Error::param("K exceeds the vertex count"));
    }
    let mut diag = BTreeMap::new();
    if g.edge_count() == 0 {
        diag.insert("degenerate".to_owned(), 1.0);
        return Ok(ReconstructionResult {
            estimated: (0..k).collect(),
            overlap: None,
            method: "line-peel".into(),
            diagnostics: diag,
        });
    }
    let lp = longest_path(g, DEFAULT_PATH_BUDGET);
    let labels = component_labels(g);
    let comp_label = labels[lp.path[0]];
    let component: Vec<usize> = (0..g.n()).filter(|&v| labels[v] == comp_label).collect();
    let rounds = (k as f64).sqrt().ceil() as usize;
    let survivors = peel(&component, g, rounds);

    let mut in_estimate = vec![false; g.n()];
    let on_path_pos: Vec<usize> = lp
        .path
        .iter()
        .enumerate()
        .filter(|(_, &v)| survivors.binary_search(&v).is_ok())
        .map(|(i, _)| i)
        .collect();
    // middle of the surviving stretch of the longest path
    let mid_pos = if on_path_pos.is_empty() {
        (lp.path.len() - 1) / 2
    } else {
        on_path_pos[(on_path_pos.len() - 1) / 2]
    };
    let mid_vertex = lp.path[mid_pos];

    let mut estimate: Vec<usize>;
    let (mut trimmed, mut padded) = (0usize, 0usize);
    if survivors.len() > k {
        let dist = bfs_distances(g, &[mid_vertex], |v| labels[v] == comp_label);
        let mut ranked = survivors.clone();
        ranked.sort_by_key(|&v| (dist[v], v));
        ranked.truncate(k);
        trimmed = survivors.len() - k;
        estimate = ranked;
        for &v in &estimate {
            in_estimate[v] = true;
        }
    } else {
        estimate = survivors.clone();
        for &v in &estimate {
            in_estimate[v] = true;
        }
        // walk outward along the longest path, nearest positions first
        let mut by_pos: Vec<usize> = (0..lp.path.len()).collect();
        by_pos.sort_by_key(|&i| (i.abs_diff(mid_pos), i));
        for i in by_pos {
            if estimate.len() == k {
                break;
            }
            let v = lp.path[i];
            if !in_estimate[v] {
                in_estimate[v] = true;
                estimate.push(v);
                padded += 1;
            }
        }
        if estimate.len() < k {
            let dist = bfs_distances(g, &estimate, |v| labels[v] == comp_label);
            let mut rest: Vec<usize> = component.iter().copied().filter(|&v| !in_estimate[v]).collect();
            rest.sort_by_key(|&v| (dist[v], v));
            for v in rest.into_iter().take(k - estimate.len()) {
                in_estimate[v] = true;
                estimate.push(v);
                padded += 1;
            }
        }
        if estimate.len() < k {
            for v in 0..g.n() {
                if estimate.len() == k {
                    break;
                }
                if !in_estimate[v] {
                    in_estimate[v] = true;
                    estimate.push(v);
                    padded += 1;
                }
            }
        }
    }
    estimate.sort_unstable();
    diag.insert("peel_rounds".into(), rounds as f64);
    diag.insert("component_size".into(), component.len() as f64);
    diag.insert("survivors".into(), survivors.len() as f64);
    diag.insert("pad_count".into(), padded as f64);
    diag.insert("trim_count".into(), trimmed as f64);
    diag.insert("longest_path_len".into(), lp.length as f64);
    diag.insert("peels_isolated".into(), 1.0);
    Ok(ReconstructionResult {
        estimated: estimate,
        overlap: None,
        method: "line-peel".into(),
        diagnostics: diag,
    })
}

/// Highest-degree vertex plus `K` of its neighbors drawn uniformly without
/// replacement; short neighborhoods are padded with the lowest-index
/// non-neighbors.
pub fn reconstruct_star(g: &Graph, k: usize, seed: u64) -> Result<ReconstructionResult> {
    if k < 1 {
        return Err(Error::param("star reconstruction needs K >= 1"));
    }
    if k + 1 > g.n() {
        return Err(Error::param("K + 1 exceeds the vertex count"));
    }
    let (deg, center) = g.max_degree().expect("n >= 2");
    let nbrs = g.neighbors(center);
    let mut estimate = vec![center];
    let mut padded = 0;
    if deg >= k {
        let mut rng = rng_from_seed(seed);
        estimate.extend(index::sample(&mut rng, deg, k).into_iter().map(|i| nbrs[i] as usize));
    } else {
        estimate.extend(nbrs.iter().map(|&w| w as usize));
        let mut v = 0;
        while estimate.len() < k + 1 {
            if v != center && nbrs.binary_search(&(v as u32)).is_err() {
                estimate.push(v);
                padded += 1;
            }
            v += 1;
        }
    }
    estimate.sort_unstable();
    let mut diag = BTreeMap::new();
    diag.insert("center".into(), center as f64);
    diag.insert("center_degree".into(), deg as f64);
    diag.insert("pad_count".into(), padded as f64);
    Ok(ReconstructionResult {
        estimated: estimate,
        overlap: None,
        method: "star-max-degree".into(),
        diagnostics: diag,
    })
}
