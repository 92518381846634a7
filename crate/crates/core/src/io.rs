// SPDX-License-Identifier: Apache-2.0

//! Edge-list files and their ground-truth sidecar.
//!
//! The edge list is plain ASCII: a header line `n m`, then `m` lines `u v`
//! with `u < v`, each newline-terminated. The sidecar lives at
//! `<path>.truth.json` and records the seed, lambda and (when planted) the
//! planted structure.

use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::plant::{GroundTruth, Instance, PlantSpec};

#[derive(Debug, Serialize, Deserialize)]
struct Sidecar {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    spec: Option<PlantSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    vertices: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    edges: Option<Vec<(usize, usize)>>,
    seed: u64,
    lambda: f64,
}

pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".truth.json");
    PathBuf::from(s)
}

pub fn format_edgelist(g: &Graph) -> String {
    let mut out = String::with_capacity(16 + 14 * g.edge_count());
    let _ = writeln!(out, "{} {}", g.n(), g.edge_count());
    for (u, v) in g.edges() {
        let _ = writeln!(out, "{u} {v}");
    }
    out
}

pub fn parse_edgelist(text: &str) -> Result<Graph> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let (_, header) = lines.next().ok_or_else(|| Error::parse(1, "missing header"))?;
    let (n, m) = parse_pair(header).ok_or_else(|| Error::parse(1, format!("malformed header {header:?}")))?;
    let mut edges: Vec<(u32, u32)> = Vec::with_capacity(m.min(1 << 24));
    let mut seen = std::collections::HashSet::with_capacity(m.min(1 << 24));
    let mut last_line = 1;
    for (lineno, line) in lines {
        last_line = lineno;
        if line.trim().is_empty() {
            continue;
        }
        let (a, b) = parse_pair(line).ok_or_else(|| Error::parse(lineno, format!("malformed edge line {line:?}")))?;
        if a >= n || b >= n {
            return Err(Error::parse(lineno, format!("vertex index out of range for n = {n}")));
        }
        if a == b {
            return Err(Error::parse(lineno, format!("self-loop at vertex {a}")));
        }
        let e = if a < b { (a as u32, b as u32) } else { (b as u32, a as u32) };
        if !seen.insert(e) {
            return Err(Error::parse(lineno, format!("duplicate edge ({}, {})", e.0, e.1)));
        }
        edges.push(e);
    }
    if edges.len() != m {
        return Err(Error::parse(
            last_line,
            format!("header announces {m} edges but {} were read", edges.len()),
        ));
    }
    Graph::from_edges(n, edges.into_iter().map(|(u, v)| (u as usize, v as usize)))
        .map_err(|e| Error::parse(1, e.to_string()))
}

fn parse_pair(line: &str) -> Option<(usize, usize)> {
    let mut it = line.split_ascii_whitespace();
    let a = it.next()?.parse().ok()?;
    let b = it.next()?.parse().ok()?;
    if it.next().is_some() {
        return None;
    }
    Some((a, b))
}

/// Write the edge list and its sidecar.
pub fn save_edgelist(inst: &Instance, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, format_edgelist(&inst.graph))?;
    let sidecar = Sidecar {
        spec: inst.truth.as_ref().map(|t| t.spec),
        vertices: inst.truth.as_ref().map(|t| t.vertices.clone()),
        edges: inst.truth.as_ref().map(|t| t.edges.clone()),
        seed: inst.seed,
        lambda: inst.lambda,
    };
    fs::write(sidecar_path(path), serde_json::to_string_pretty(&sidecar)? + "\n")?;
    Ok(())
}

/// Read an edge list and, if present, its sidecar.
///
/// Without a sidecar the instance gets seed 0 and `lambda = 2m / n`.
pub fn load_edgelist(path: impl AsRef<Path>) -> Result<Instance> {
    let path = path.as_ref();
    let graph = parse_edgelist(&fs::read_to_string(path)?)?;
    let side = sidecar_path(path);
    if !side.exists() {
        let lambda = if graph.n() == 0 {
            0.0
        } else {
            2.0 * graph.edge_count() as f64 / graph.n() as f64
        };
        return Ok(Instance::unplanted(graph, 0, lambda));
    }
    let sc: Sidecar = serde_json::from_str(&fs::read_to_string(&side)?)?;
    let truth = match (sc.spec, sc.vertices, sc.edges) {
        (Some(spec), Some(vertices), Some(edges)) => Some(GroundTruth { spec, vertices, edges }),
        (None, None, None) => None,
        _ => return Err(Error::param("truth sidecar is missing spec, vertices or edges")),
    };
    let inst = Instance {
        graph,
        truth,
        seed: sc.seed,
        lambda: sc.lambda,
    };
    validate_truth(&inst)?;
    Ok(inst)
}

fn validate_truth(inst: &Instance) -> Result<()> {
    let Some(t) = &inst.truth else { return Ok(()) };
    if t.vertices.len() != t.spec.vertex_count() {
        return Err(Error::param("truth vertex count does not match its spec"));
    }
    let mut sorted = t.vertex_set();
    sorted.dedup();
    if sorted.len() != t.vertices.len() || sorted.last().is_some_and(|&v| v >= inst.graph.n()) {
        return Err(Error::param("truth vertices must be distinct and in range"));
    }
    if let Some(&(u, v)) = t.edges.iter().find(|&&(u, v)| !inst.graph.has_edge(u, v)) {
        return Err(Error::param(format!("planted edge ({u}, {v}) missing from graph")));
    }
    Ok(())
}
