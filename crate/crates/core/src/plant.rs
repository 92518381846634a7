// SPDX-License-Identifier: Apache-2.0

//! Planted structures and the instances that carry them.

use rand::seq::{index, SliceRandom};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::rng::rng_from_seed;

/// The structure hidden in the graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "lowercase")]
pub enum PlantSpec {
    /// Path on `k` vertices.
    Line {
        #[serde(rename = "K")]
        k: usize,
    },
    /// Center plus `k` leaves.
    Star {
        #[serde(rename = "K")]
        k: usize,
    },
    /// Complete `d`-ary tree of height `h` (a lone root has height 0).
    #[serde(rename = "dary")]
    DaryTree {
        #[serde(rename = "D")]
        d: usize,
        h: usize,
    },
}

impl PlantSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            PlantSpec::Line { k } if k < 2 => Err(Error::param("line needs K >= 2")),
            PlantSpec::Star { k } if k < 1 => Err(Error::param("star needs K >= 1")),
            PlantSpec::DaryTree { d, .. } if d < 1 => Err(Error::param("D-ary tree needs D >= 1")),
            PlantSpec::DaryTree { .. } if self.vertex_count() == usize::MAX => {
                Err(Error::param("D-ary tree too large"))
            }
            _ => Ok(()),
        }
    }

    /// Number of vertices; saturates at `usize::MAX` for absurd trees.
    pub fn vertex_count(&self) -> usize {
        match *self {
            PlantSpec::Line { k } => k,
            PlantSpec::Star { k } => k + 1,
            PlantSpec::DaryTree { d, h } => dary_vertex_count(d, h).unwrap_or(usize::MAX),
        }
    }

    pub fn edge_count(&self) -> usize {
        match *self {
            PlantSpec::Line { k } => k.saturating_sub(1),
            PlantSpec::Star { k } => k,
            PlantSpec::DaryTree { .. } => self.vertex_count().saturating_sub(1),
        }
    }

    /// Edges of the labeled template on `0..vertex_count()`.
    ///
    /// Lines run `0-1-...-(K-1)`; stars have center 0; trees are laid out in
    /// breadth-first order with the children of `i` at `D*i+1 ..= D*i+D`.
    pub fn template_edges(&self) -> Vec<(usize, usize)> {
        match *self {
            PlantSpec::Line { k } => (1..k).map(|i| (i - 1, i)).collect(),
            PlantSpec::Star { k } => (1..=k).map(|i| (0, i)).collect(),
            PlantSpec::DaryTree { d, .. } => (1..self.vertex_count()).map(|c| ((c - 1) / d, c)).collect(),
        }
    }

    pub fn template(&self) -> Graph {
        Graph::from_edges(self.vertex_count(), self.template_edges()).expect("template is simple")
    }

    /// Number of internal (non-leaf) vertices of a tree template.
    pub fn internal_count(&self) -> usize {
        match *self {
            PlantSpec::DaryTree { d, h } => {
                if h == 0 {
                    0
                } else {
                    dary_vertex_count(d, h - 1).unwrap_or(usize::MAX)
                }
            }
            PlantSpec::Line { k } => k.saturating_sub(2),
            PlantSpec::Star { k } => usize::from(k > 0),
        }
    }
}

/// `(D^{h+1} - 1) / (D - 1)`, or `h + 1` when `D = 1`.
fn dary_vertex_count(d: usize, h: usize) -> Option<usize> {
    if d == 1 {
        return h.checked_add(1);
    }
    let mut total: usize = 0;
    let mut level: usize = 1;
    for depth in 0..=h {
        total = total.checked_add(level)?;
        if depth < h {
            level = level.checked_mul(d)?;
        }
    }
    Some(total)
}

impl fmt::Display for PlantSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            PlantSpec::Line { k } => write!(f, "line:{k}"),
            PlantSpec::Star { k } => write!(f, "star:{k}"),
            PlantSpec::DaryTree { d, h } => write!(f, "dary:{d},{h}"),
        }
    }
}

/// Parses `line:K`, `star:K` or `dary:D,h`.
impl FromStr for PlantSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, args) = s
            .split_once(':')
            .ok_or_else(|| Error::param(format!("expected line:K, star:K or dary:D,h, got {s:?}")))?;
        let num = |t: &str| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| Error::param(format!("bad integer {t:?} in {s:?}")))
        };
        let spec = match kind.trim() {
            "line" => PlantSpec::Line { k: num(args)? },
            "star" => PlantSpec::Star { k: num(args)? },
            "dary" => {
                let (d, h) = args
                    .split_once(',')
                    .ok_or_else(|| Error::param(format!("dary needs D,h in {s:?}")))?;
                PlantSpec::DaryTree { d: num(d)?, h: num(h)? }
            }
            other => return Err(Error::param(format!("unknown structure {other:?}"))),
        };
        spec.validate()?;
        Ok(spec)
    }
}

/// The planted copy: `vertices[i]` is the image of template vertex `i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub spec: PlantSpec,
    pub vertices: Vec<usize>,
    pub edges: Vec<(usize, usize)>,
}

impl GroundTruth {
    pub fn vertex_set(&self) -> Vec<usize> {
        let mut v = self.vertices.clone();
        v.sort_unstable();
        v
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub graph: Graph,
    pub truth: Option<GroundTruth>,
    pub seed: u64,
    pub lambda: f64,
}

impl Instance {
    pub fn unplanted(graph: Graph, seed: u64, lambda: f64) -> Self {
        Instance {
            graph,
            truth: None,
            seed,
            lambda,
        }
    }
}

/// Plant `spec` into `base` through a uniformly random injective map.
///
/// Planted edges already present in `base` are merged silently. The returned
/// instance records `seed`; `lambda` is left at zero for the caller to fill.
pub fn plant(base: &Graph, spec: PlantSpec, seed: u64) -> Result<Instance> {
    spec.validate()?;
    let k = spec.vertex_count();
    if k > base.n() {
        return Err(Error::param(format!(
            "{spec} needs {k} vertices but the graph has only {}",
            base.n()
        )));
    }
    let mut rng = rng_from_seed(seed);
    // a uniform k-subset in uniformly random order is a uniform injection
    let mut sigma = index::sample(&mut rng, base.n(), k).into_vec();
    sigma.shuffle(&mut rng);
    let edges: Vec<(usize, usize)> = spec
        .template_edges()
        .into_iter()
        .map(|(a, b)| {
            let (u, v) = (sigma[a], sigma[b]);
            if u < v {
                (u, v)
            } else {
                (v, u)
            }
        })
        .collect();
    let graph = base.union_with(&edges)?;
    Ok(Instance {
        graph,
        truth: Some(GroundTruth {
            spec,
            vertices: sigma,
            edges,
        }),
        seed,
        lambda: 0.0,
    })
}
