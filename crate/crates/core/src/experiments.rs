// SPDX-License-Identifier: Apache-2.0

//! Monte Carlo harness: paired null/planted trials, sweeps over a
//! `(lambda, size)` grid, and CSV/SVG output.
//!
//! Trial `t` of cell `c` draws all of its randomness from
//! `split_seed(master_seed, c, t)`, with separate sub-streams for the null
//! graph, the planted base graph, the planting map and the reconstructor.
//! Results are reduced in `(cell, trial)` order, so tables are identical
//! whatever the thread count.

use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use crate::detect::{component_count_test, dary_test, k_path_test, star_test, DetectionResult, TestKind};
use crate::error::{Error, Result};
use crate::graph::{sample_er, Graph};
use crate::par::{map_indexed, Exec};
use crate::plant::{plant, PlantSpec};
use crate::reconstruct::{reconstruct_line, reconstruct_star, ReconstructionResult};
use crate::rng::{split_seed, tag};

/// A detection test together with its parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "test", rename_all = "lowercase")]
pub enum Detector {
    Components {
        #[serde(rename = "K")]
        k: usize,
    },
    #[serde(rename = "kpath")]
    KPath {
        #[serde(rename = "K")]
        k: usize,
    },
    Star {
        #[serde(rename = "K")]
        k: usize,
    },
    Dary {
        #[serde(rename = "D")]
        d: usize,
        h: usize,
    },
}

impl Detector {
    pub fn run(&self, g: &Graph) -> Result<DetectionResult> {
        match *self {
            Detector::Components { k } => component_count_test(g, k),
            Detector::KPath { k } => k_path_test(g, k),
            Detector::Star { k } => star_test(g, k),
            Detector::Dary { d, h } => dary_test(g, d, h),
        }
    }

    /// The natural parameters of `kind` for a planted `spec`: the
    /// structure's vertex count for the component test, `K` for paths and
    /// stars, `(D, h)` for trees.
    pub fn matching(kind: TestKind, spec: PlantSpec) -> Result<Self> {
        Ok(match (kind, spec) {
            (TestKind::Components, s) => Detector::Components { k: s.vertex_count() },
            (TestKind::KPath, PlantSpec::Line { k }) => Detector::KPath { k },
            (TestKind::Star, PlantSpec::Star { k }) => Detector::Star { k },
            (TestKind::Dary, PlantSpec::DaryTree { d, h }) => Detector::Dary { d, h },
            (kind, spec) => {
                return Err(Error::param(format!("test {kind:?} does not apply to {spec}")));
            }
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Reconstructor {
    Line,
    Star,
}

impl Reconstructor {
    pub fn run(&self, g: &Graph, spec: PlantSpec, seed: u64) -> Result<ReconstructionResult> {
        match (self, spec) {
            (Reconstructor::Line, PlantSpec::Line { k }) => reconstruct_line(g, k),
            (Reconstructor::Star, PlantSpec::Star { k }) => reconstruct_star(g, k, seed),
            (r, s) => Err(Error::param(format!("reconstructor {r:?} does not apply to {s}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialConfig {
    pub n: usize,
    pub lambda: f64,
    /// `None` runs null trials only.
    pub spec: Option<PlantSpec>,
    pub detector: Detector,
    pub reconstructor: Option<Reconstructor>,
    pub master_seed: u64,
    pub trials: usize,
    /// Seeds of different cells of a sweep are split on this id.
    #[serde(default)]
    pub cell_id: u64,
}

/// Aggregated outcome of one cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellStats {
    pub lambda: f64,
    pub size: usize,
    pub trials: usize,
    /// Null trials rejected.
    pub false_positives: usize,
    /// Planted trials accepted; `None` without a planted structure.
    pub false_negatives: Option<usize>,
    pub fpr: f64,
    pub fnr: Option<f64>,
    /// Sum of overlaps over planted trials.
    pub overlap_total: Option<u64>,
    /// Mean of `overlap / |planted set|`.
    pub mean_overlap_fraction: Option<f64>,
    /// Per-trial overlaps in trial order.
    pub overlaps: Option<Vec<usize>>,
    /// Detector runs whose statistic was not certified exact.
    pub inexact_runs: usize,
}

struct TrialOutcome {
    null_rejected: bool,
    planted_rejected: Option<bool>,
    planted_exact: bool,
    overlap: Option<usize>,
    inexact: usize,
}

fn run_one(cfg: &TrialConfig, t: usize) -> Result<TrialOutcome> {
    let trial_seed = split_seed(cfg.master_seed, cfg.cell_id, t as u64);
    let null_graph = sample_er(cfg.n, cfg.lambda, split_seed(trial_seed, tag::H0, 0))?;
    let null_result = cfg.detector.run(&null_graph)?;
    drop(null_graph);
    let mut out = TrialOutcome {
        null_rejected: null_result.decision.is_h1(),
        planted_rejected: None,
        planted_exact: true,
        overlap: None,
        inexact: usize::from(!null_result.exact),
    };
    if let Some(spec) = cfg.spec {
        let base = sample_er(cfg.n, cfg.lambda, split_seed(trial_seed, tag::H1, 0))?;
        let inst = plant(&base, spec, split_seed(trial_seed, tag::PLANT, 0))?;
        drop(base);
        let res = cfg.detector.run(&inst.graph)?;
        out.planted_rejected = Some(res.decision.is_h1());
        out.planted_exact = res.exact;
        out.inexact += usize::from(!res.exact);
        if let Some(rec) = cfg.reconstructor {
            let truth = inst.truth.as_ref().expect("planted instance");
            let r = rec
                .run(&inst.graph, spec, split_seed(trial_seed, tag::RECONSTRUCT, 0))?
                .scored(&truth.vertices);
            out.overlap = r.overlap;
        }
    }
    Ok(out)
}

/// Run `cfg.trials` paired trials and aggregate them.
pub fn run_trials(cfg: &TrialConfig) -> Result<CellStats> {
    run_trials_with(cfg, Exec::Parallel)
}

pub fn run_trials_with(cfg: &TrialConfig, exec: Exec) -> Result<CellStats> {
    if cfg.trials == 0 {
        return Err(Error::param("trials must be at least 1"));
    }
    if let Some(spec) = cfg.spec {
        spec.validate()?;
    }
    let outcomes = map_indexed(cfg.trials, exec, |t| run_one(cfg, t));
    let mut stats = CellStats {
        lambda: cfg.lambda,
        size: size_of(cfg),
        trials: cfg.trials,
        false_positives: 0,
        false_negatives: cfg.spec.map(|_| 0),
        fpr: 0.0,
        fnr: None,
        overlap_total: None,
        mean_overlap_fraction: None,
        overlaps: None,
        inexact_runs: 0,
    };
    let mut overlaps = Vec::new();
    for o in outcomes {
        let o = o?;
        stats.false_positives += usize::from(o.null_rejected);
        if let (Some(fn_count), Some(rejected)) = (stats.false_negatives.as_mut(), o.planted_rejected) {
            *fn_count += usize::from(!rejected);
            // a planted line always contains a K-path
            if matches!(cfg.detector, Detector::KPath { .. }) && o.planted_exact {
                assert!(rejected, "K-path test missed a planted path");
            }
        }
        stats.inexact_runs += o.inexact;
        if let Some(ov) = o.overlap {
            overlaps.push(ov);
        }
    }
    let trials = cfg.trials as f64;
    stats.fpr = stats.false_positives as f64 / trials;
    stats.fnr = stats.false_negatives.map(|f| f as f64 / trials);
    if !overlaps.is_empty() {
        let planted = cfg.spec.map(|s| s.vertex_count()).unwrap_or(1) as f64;
        let total: u64 = overlaps.iter().map(|&o| o as u64).sum();
        stats.overlap_total = Some(total);
        stats.mean_overlap_fraction = Some(overlaps.iter().map(|&o| o as f64 / planted).sum::<f64>() / trials);
        stats.overlaps = Some(overlaps);
    }
    Ok(stats)
}

fn size_of(cfg: &TrialConfig) -> usize {
    match (cfg.spec, cfg.detector) {
        (Some(PlantSpec::Line { k }), _) | (Some(PlantSpec::Star { k }), _) => k,
        (Some(PlantSpec::DaryTree { h, .. }), _) => h,
        (None, Detector::Components { k } | Detector::KPath { k } | Detector::Star { k }) => k,
        (None, Detector::Dary { h, .. }) => h,
    }
}

/// Which structure family a sweep plants; the size axis sets `K` (or `h`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PlantFamily {
    Line,
    Star,
    Dary { d: usize },
}

impl PlantFamily {
    pub fn spec(&self, size: usize) -> PlantSpec {
        match *self {
            PlantFamily::Line => PlantSpec::Line { k: size },
            PlantFamily::Star => PlantSpec::Star { k: size },
            PlantFamily::Dary { d } => PlantSpec::DaryTree { d, h: size },
        }
    }
}

/// Parses `line`, `star` or `dary:D`.
impl FromStr for PlantFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "line" => Ok(PlantFamily::Line),
            "star" => Ok(PlantFamily::Star),
            other => match other.strip_prefix("dary:") {
                Some(d) => Ok(PlantFamily::Dary {
                    d: d.trim().parse().map_err(|_| Error::param(format!("bad arity in {s:?}")))?,
                }),
                None => Err(Error::param(format!("unknown structure family {s:?}"))),
            },
        }
    }
}

impl FromStr for TestKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "components" => Ok(TestKind::Components),
            "kpath" => Ok(TestKind::KPath),
            "star" => Ok(TestKind::Star),
            "dary" => Ok(TestKind::Dary),
            other => Err(Error::param(format!("unknown test {other:?}"))),
        }
    }
}

/// Everything a sweep needs besides the grid itself.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepBase {
    pub n: usize,
    pub family: PlantFamily,
    pub test: TestKind,
    pub reconstructor: Option<Reconstructor>,
    pub master_seed: u64,
    pub trials: usize,
}

impl SweepBase {
    fn cell_config(&self, lambda: f64, size: usize, cell_id: u64) -> Result<TrialConfig> {
        let spec = self.family.spec(size);
        Ok(TrialConfig {
            n: self.n,
            lambda,
            spec: Some(spec),
            detector: Detector::matching(self.test, spec)?,
            reconstructor: self.reconstructor,
            master_seed: self.master_seed,
            trials: self.trials,
            cell_id,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub lambdas: Vec<f64>,
    pub sizes: Vec<usize>,
    /// Row-major: cell `(i, j)` is `cells[i * sizes.len() + j]` for
    /// `lambdas[i]`, `sizes[j]`.
    pub cells: Vec<CellStats>,
}

impl SweepTable {
    pub fn cell(&self, lambda_idx: usize, size_idx: usize) -> &CellStats {
        &self.cells[lambda_idx * self.sizes.len() + size_idx]
    }
}

/// Run every cell of the `lambdas x sizes` grid.
pub fn sweep(lambdas: &[f64], sizes: &[usize], base: &SweepBase) -> Result<SweepTable> {
    sweep_with(lambdas, sizes, base, Exec::Parallel)
}

pub fn sweep_with(lambdas: &[f64], sizes: &[usize], base: &SweepBase, exec: Exec) -> Result<SweepTable> {
    if lambdas.is_empty() || sizes.is_empty() {
        return Err(Error::param("sweep grid is empty"));
    }
    let mut configs = Vec::with_capacity(lambdas.len() * sizes.len());
    for (i, &lambda) in lambdas.iter().enumerate() {
        for (j, &size) in sizes.iter().enumerate() {
            configs.push(base.cell_config(lambda, size, (i * sizes.len() + j) as u64)?);
        }
    }
    let cells = map_indexed(configs.len(), exec, |c| run_trials_with(&configs[c], exec))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepTable {
        lambdas: lambdas.to_vec(),
        sizes: sizes.to_vec(),
        cells,
    })
}

/// Grid description read by the `sweep` subcommand.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub n: usize,
    pub lambdas: Vec<f64>,
    pub sizes: Vec<usize>,
    /// `line`, `star` or `dary:D`.
    pub plant: String,
    /// `components`, `kpath`, `star` or `dary`.
    pub test: String,
    #[serde(default)]
    pub reconstructor: Option<Reconstructor>,
    pub trials: usize,
    #[serde(default)]
    pub master_seed: u64,
}

impl SweepConfig {
    pub fn base(&self) -> Result<SweepBase> {
        Ok(SweepBase {
            n: self.n,
            family: self.plant.parse()?,
            test: self.test.parse()?,
            reconstructor: self.reconstructor,
            master_seed: self.master_seed,
            trials: self.trials,
        })
    }

    pub fn run(&self) -> Result<SweepTable> {
        sweep(&self.lambdas, &self.sizes, &self.base()?)
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn format_csv(table: &SweepTable) -> String {
    let mut out = String::from("lambda,size,trials,fpr,fnr,mean_overlap_fraction\n");
    for c in &table.cells {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            c.lambda,
            c.size,
            c.trials,
            c.fpr,
            opt(c.fnr),
            opt(c.mean_overlap_fraction)
        );
    }
    out
}

pub fn emit_csv(table: &SweepTable, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, format_csv(table))?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    Fpr,
    Fnr,
    MeanOverlapFraction,
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fpr" => Ok(Metric::Fpr),
            "fnr" => Ok(Metric::Fnr),
            "mean_overlap_fraction" => Ok(Metric::MeanOverlapFraction),
            other => Err(Error::param(format!("unknown metric {other:?}"))),
        }
    }
}

impl Metric {
    fn value(&self, c: &CellStats) -> Option<f64> {
        match self {
            Metric::Fpr => Some(c.fpr),
            Metric::Fnr => c.fnr,
            Metric::MeanOverlapFraction => c.mean_overlap_fraction,
        }
    }

    fn name(&self) -> &'static str {
        match self {
            Metric::Fpr => "fpr",
            Metric::Fnr => "fnr",
            Metric::MeanOverlapFraction => "mean_overlap_fraction",
        }
    }
}

const CELL: usize = 48;
const MARGIN_LEFT: usize = 72;
const MARGIN_TOP: usize = 40;

/// Grayscale heatmap: rows are lambdas, columns sizes; black is 1.
pub fn format_svg_heatmap(table: &SweepTable, metric: &str) -> Result<String> {
    let metric: Metric = metric.parse()?;
    let width = MARGIN_LEFT + CELL * table.sizes.len() + 8;
    let height = MARGIN_TOP + CELL * table.lambdas.len() + 8;
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" font-family="monospace" font-size="11">"#
    );
    let _ = writeln!(out, r#"<title>{}</title>"#, metric.name());
    for (j, size) in table.sizes.iter().enumerate() {
        let x = MARGIN_LEFT + CELL * j + CELL / 2;
        let _ = writeln!(out, r#"<text x="{x}" y="{}" text-anchor="middle">{size}</text>"#, MARGIN_TOP - 8);
    }
    for (i, lambda) in table.lambdas.iter().enumerate() {
        let y = MARGIN_TOP + CELL * i + CELL / 2 + 4;
        let _ = writeln!(out, r#"<text x="{}" y="{y}" text-anchor="end">{lambda}</text>"#, MARGIN_LEFT - 6);
        for j in 0..table.sizes.len() {
            let cell = table.cell(i, j);
            let fill = match metric.value(cell) {
                Some(v) => {
                    let level = (255.0 * (1.0 - v.clamp(0.0, 1.0))).round() as u8;
                    format!("rgb({level},{level},{level})")
                }
                None => "none".to_owned(),
            };
            let _ = writeln!(
                out,
                r#"<rect x="{}" y="{}" width="{CELL}" height="{CELL}" fill="{fill}" stroke="gray"/>"#,
                MARGIN_LEFT + CELL * j,
                MARGIN_TOP + CELL * i
            );
        }
    }
    out.push_str("</svg>\n");
    Ok(out)
}

pub fn emit_svg_heatmap(table: &SweepTable, metric: &str, path: impl AsRef<Path>) -> Result<()> {
    let svg = format_svg_heatmap(table, metric)?;
    std::fs::write(path, svg)?;
    Ok(())
}
