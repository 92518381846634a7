// SPDX-License-Identifier: Apache-2.0

//! Exact brute-force computations for tiny instances.
//!
//! Everything here enumerates: embeddings of a template, ordered paths, or
//! whole graph spaces. Each routine runs under an explicit step budget and
//! returns [`Error::BudgetExceeded`] instead of an approximate answer.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::par::{map_indexed, Exec};
use crate::plant::PlantSpec;

pub const DEFAULT_BUDGET: u64 = 10_000_000;

/// Countdown of elementary steps.
#[derive(Debug, Clone)]
pub struct Budget {
    total: u64,
    used: u64,
}

impl Budget {
    pub fn new(total: u64) -> Self {
        Budget { total, used: 0 }
    }

    #[inline]
    fn tick(&mut self) -> Result<()> {
        self.charge(1)
    }

    #[inline]
    fn charge(&mut self, steps: u64) -> Result<()> {
        self.used = self.used.saturating_add(steps);
        if self.used > self.total {
            Err(Error::BudgetExceeded { budget: self.total })
        } else {
            Ok(())
        }
    }

    pub fn used(&self) -> u64 {
        self.used
    }
}

impl Default for Budget {
    fn default() -> Self {
        Budget::new(DEFAULT_BUDGET)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CopyCount {
    /// Injective edge-preserving maps from the template into the graph.
    pub embeddings: u64,
    /// Distinct copies: `embeddings / aut_size`.
    pub copies: u64,
    pub aut_size: u64,
}

fn factorial(k: usize) -> u64 {
    (1..=k as u64).fold(1u64, |acc, x| acc.saturating_mul(x))
}

/// Size of the automorphism group of the template.
///
/// Lines have the reversal; stars permute their leaves; a complete D-ary
/// tree permutes the children of every internal vertex independently. A
/// single edge (`Star{1}` or any `DaryTree{1, h >= 1}`, which are paths) has
/// the reversal as well.
pub fn aut_size(spec: PlantSpec) -> u64 {
    match spec {
        PlantSpec::Line { k } => {
            if k >= 2 {
                2
            } else {
                1
            }
        }
        PlantSpec::Star { k: 1 } => 2,
        PlantSpec::Star { k } => factorial(k),
        PlantSpec::DaryTree { d: 1, h } => {
            if h >= 1 {
                2
            } else {
                1
            }
        }
        PlantSpec::DaryTree { d, .. } => {
            let per_vertex = factorial(d);
            (0..spec.internal_count()).fold(1u64, |acc, _| acc.saturating_mul(per_vertex))
        }
    }
}

/// Count injective embeddings of `pattern` into `g` by backtracking.
///
/// Pattern vertices are matched in breadth-first order so that every vertex
/// after the first in its component has an already-matched neighbor whose
/// image bounds the candidate list.
pub fn count_embeddings(g: &Graph, pattern: &Graph, budget: &mut Budget) -> Result<u64> {
    let k = pattern.n();
    if k == 0 {
        return Ok(1);
    }
    if k > g.n() {
        return Ok(0);
    }
    // breadth-first order over the pattern, component by component
    let mut order = Vec::with_capacity(k);
    let mut parent = vec![usize::MAX; k];
    let mut placed = vec![false; k];
    for s in 0..k {
        if placed[s] {
            continue;
        }
        placed[s] = true;
        let start = order.len();
        order.push(s);
        let mut head = start;
        while head < order.len() {
            let u = order[head];
            head += 1;
            for &w in pattern.neighbors(u) {
                let w = w as usize;
                if !placed[w] {
                    placed[w] = true;
                    parent[w] = u;
                    order.push(w);
                }
            }
        }
    }
    let mut image = vec![usize::MAX; k];
    let mut used = vec![false; g.n()];
    let mut count = 0u64;
    extend(g, pattern, &order, &parent, 0, &mut image, &mut used, &mut count, budget)?;
    Ok(count)
}

#[allow(clippy::too_many_arguments)]
fn extend(
    g: &Graph,
    pattern: &Graph,
    order: &[usize],
    parent: &[usize],
    depth: usize,
    image: &mut [usize],
    used: &mut [bool],
    count: &mut u64,
    budget: &mut Budget,
) -> Result<()> {
    if depth == order.len() {
        *count += 1;
        return Ok(());
    }
    let pv = order[depth];
    let need = pattern.degree(pv);
    let candidates: Box<dyn Iterator<Item = usize>> = if parent[pv] == usize::MAX {
        Box::new(0..g.n())
    } else {
        Box::new(g.neighbors(image[parent[pv]]).iter().map(|&w| w as usize))
    };
    for c in candidates {
        budget.tick()?;
        if used[c] || g.degree(c) < need {
            continue;
        }
        let consistent = pattern
            .neighbors(pv)
            .iter()
            .all(|&q| image[q as usize] == usize::MAX || g.has_edge(c, image[q as usize]));
        if !consistent {
            continue;
        }
        image[pv] = c;
        used[c] = true;
        extend(g, pattern, order, parent, depth + 1, image, used, count, budget)?;
        used[c] = false;
        image[pv] = usize::MAX;
    }
    Ok(())
}

/// Exact number of copies of the planted template in `g`.
pub fn count_copies(g: &Graph, spec: PlantSpec, budget: &mut Budget) -> Result<CopyCount> {
    spec.validate()?;
    let embeddings = count_embeddings(g, &spec.template(), budget)?;
    let aut = aut_size(spec);
    debug_assert_eq!(embeddings % aut, 0, "embeddings not divisible by |Aut|");
    Ok(CopyCount {
        embeddings,
        copies: embeddings / aut,
        aut_size: aut,
    })
}

/// Visit every ordered simple path on `k` vertices; `visit` sees the path.
fn for_each_k_path(g: &Graph, k: usize, budget: &mut Budget, mut visit: impl FnMut(&[usize])) -> Result<()> {
    if k == 0 || k > g.n() {
        return Ok(());
    }
    let mut path = Vec::with_capacity(k);
    let mut on_path = vec![false; g.n()];
    for s in 0..g.n() {
        budget.tick()?;
        path.push(s);
        on_path[s] = true;
        walk(g, k, &mut path, &mut on_path, budget, &mut visit)?;
        on_path[s] = false;
        path.pop();
    }
    Ok(())
}

fn walk(
    g: &Graph,
    k: usize,
    path: &mut Vec<usize>,
    on_path: &mut [bool],
    budget: &mut Budget,
    visit: &mut impl FnMut(&[usize]),
) -> Result<()> {
    if path.len() == k {
        visit(path);
        return Ok(());
    }
    let tail = *path.last().unwrap();
    for &w in g.neighbors(tail) {
        let w = w as usize;
        budget.tick()?;
        if on_path[w] {
            continue;
        }
        path.push(w);
        on_path[w] = true;
        walk(g, k, path, on_path, budget, visit)?;
        on_path[w] = false;
        path.pop();
    }
    Ok(())
}

/// Number of ordered K-paths (sequences of K distinct vertices, consecutive
/// ones adjacent).
pub fn count_k_paths(g: &Graph, k: usize, budget: &mut Budget) -> Result<u64> {
    let mut count = 0u64;
    for_each_k_path(g, k, budget, |_| count += 1)?;
    Ok(count)
}

/// `n (n-1) ... (n-k+1)` in floating point.
fn falling_factorial(n: usize, k: usize) -> f64 {
    (0..k).map(|i| (n - i) as f64).product()
}

/// Null expectation of the copy count: `m (lambda/n)^{e}` with
/// `m = n!/((n-K')! |Aut|)`.
pub fn null_copy_expectation(n: usize, spec: PlantSpec, lambda: f64) -> f64 {
    let k = spec.vertex_count();
    if k > n {
        return 0.0;
    }
    let m = falling_factorial(n, k) / aut_size(spec) as f64;
    m * (lambda / n as f64).powi(spec.edge_count() as i32)
}

/// `L(g) = X(g) / E_0 X` for the given template.
pub fn exact_likelihood_ratio(g: &Graph, spec: PlantSpec, lambda: f64, budget: &mut Budget) -> Result<f64> {
    if !(lambda > 0.0) {
        return Err(Error::param(format!("lambda must be positive, got {lambda}")));
    }
    if lambda >= g.n() as f64 {
        return Err(Error::InvalidProbability {
            lambda,
            n: g.n(),
            p: lambda / g.n() as f64,
        });
    }
    if spec.vertex_count() > g.n() {
        return Err(Error::param("template larger than the graph"));
    }
    let x = count_copies(g, spec, budget)?;
    Ok(x.copies as f64 / null_copy_expectation(g.n(), spec, lambda))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IdentityReport {
    pub n: usize,
    pub lambda: f64,
    pub graphs: u64,
    /// `max_g |P1(g) - L(g) P0(g)|`.
    pub max_abs_error: f64,
    /// `sum_g P1(g)`.
    pub sum_p1: f64,
    /// `sum_g L(g) P0(g)`.
    pub e0_l: f64,
}

/// Index of pair `(u, v)`, `u < v`, in the lexicographic list of pairs.
fn pair_index(n: usize, u: usize, v: usize) -> usize {
    u * (2 * n - u - 1) / 2 + (v - u - 1)
}

/// Enumerate every graph on `n` vertices and compare the planted-model
/// probability, computed by averaging over all placements, with
/// `L(g) P0(g)`, where `L` comes from the copy-counting oracle.
pub fn exact_identity_check(n: usize, spec: PlantSpec, lambda: f64, budget: u64) -> Result<IdentityReport> {
    spec.validate()?;
    if !(lambda > 0.0) || lambda >= n as f64 {
        return Err(Error::param(format!("need 0 < lambda < n, got lambda = {lambda}, n = {n}")));
    }
    let k = spec.vertex_count();
    if k > n {
        return Err(Error::param("template larger than the graph"));
    }
    let pairs = n * (n - 1) / 2;
    if pairs > 24 {
        return Err(Error::BudgetExceeded { budget });
    }
    let graphs = 1u64 << pairs;

    // distinct placements as edge masks, found through all injective maps
    let template = spec.template_edges();
    let mut masks: Vec<u32> = Vec::new();
    let mut sigma = Vec::with_capacity(k);
    let mut used = vec![false; n];
    let mut guard = Budget::new(budget);
    fn injections(
        n: usize,
        k: usize,
        sigma: &mut Vec<usize>,
        used: &mut [bool],
        out: &mut dyn FnMut(&[usize]),
        guard: &mut Budget,
    ) -> Result<()> {
        if sigma.len() == k {
            out(sigma);
            return Ok(());
        }
        for v in 0..n {
            guard.tick()?;
            if !used[v] {
                used[v] = true;
                sigma.push(v);
                injections(n, k, sigma, used, out, guard)?;
                sigma.pop();
                used[v] = false;
            }
        }
        Ok(())
    }
    injections(
        n,
        k,
        &mut sigma,
        &mut used,
        &mut |s| {
            let mask = template.iter().fold(0u32, |m, &(a, b)| {
                let (u, v) = if s[a] < s[b] { (s[a], s[b]) } else { (s[b], s[a]) };
                m | (1 << pair_index(n, u, v))
            });
            masks.push(mask);
        },
        &mut guard,
    )?;
    masks.sort_unstable();
    masks.dedup();
    guard.charge(graphs.saturating_mul(masks.len() as u64 + 1))?;

    let p = lambda / n as f64;
    let (ln_p, ln_q) = (p.ln(), (-p).ln_1p());
    let e_gamma = spec.edge_count() as i64;
    let placements = masks.len() as f64;
    let e0_x = null_copy_expectation(n, spec, lambda);
    let pair_list: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();

    const CHUNK: u64 = 1024;
    let chunks = graphs.div_ceil(CHUNK) as usize;
    let partial: Vec<Result<(f64, f64, f64)>> = map_indexed(chunks, Exec::Parallel, |c| {
        let mut max_err = 0.0f64;
        let mut sum_p1 = 0.0;
        let mut sum_lp0 = 0.0;
        let mut local = Budget::new(u64::MAX);
        let lo = c as u64 * CHUNK;
        let hi = (lo + CHUNK).min(graphs);
        for bits in lo..hi {
            let e = bits.count_ones() as i64;
            let log_p0 = e as f64 * ln_p + (pairs as i64 - e) as f64 * ln_q;
            let p0 = log_p0.exp();
            let contained = masks.iter().filter(|&&m| bits as u32 & m == m).count() as f64;
            let p1 = if contained > 0.0 {
                contained / placements * ((e - e_gamma) as f64 * ln_p + (pairs as i64 - e) as f64 * ln_q).exp()
            } else {
                0.0
            };
            let g = Graph::from_edges(
                n,
                pair_list
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| bits >> i & 1 == 1)
                    .map(|(_, &e)| e),
            )?;
            let x = count_copies(&g, spec, &mut local)?.copies as f64;
            let lp0 = x / e0_x * p0;
            max_err = max_err.max((p1 - lp0).abs());
            sum_p1 += p1;
            sum_lp0 += lp0;
        }
        Ok((max_err, sum_p1, sum_lp0))
    });
    let mut report = IdentityReport {
        n,
        lambda,
        graphs,
        max_abs_error: 0.0,
        sum_p1: 0.0,
        e0_l: 0.0,
    };
    for part in partial {
        let (m, s1, sl) = part?;
        report.max_abs_error = report.max_abs_error.max(m);
        report.sum_p1 += s1;
        report.e0_l += sl;
    }
    Ok(report)
}

/// Exact `E_0(L^2) = E[(n/lambda)^S]` for lines, where `S` is the number of
/// undirected edges a uniform ordered K-path over `[n]` shares with the fixed
/// path `0-1-...-(K-1)`.
pub fn exact_e0_l2_line(n: usize, k: usize, lambda: f64, budget: u64) -> Result<f64> {
    if k < 2 || k > n {
        return Err(Error::param(format!("need 2 <= K <= n, got K = {k}, n = {n}")));
    }
    if !(lambda > 0.0) {
        return Err(Error::param("lambda must be positive"));
    }
    let x = n as f64 / lambda;
    let mut hist = vec![0u64; k];
    let mut guard = Budget::new(budget);
    // every K-tuple of distinct vertices is a path of the complete graph
    for_each_k_path(&Graph::complete(n), k, &mut guard, |path| {
        let shared = path.windows(2).filter(|w| w[0].abs_diff(w[1]) == 1 && w[0].max(w[1]) < k).count();
        hist[shared] += 1;
    })?;
    let total: u64 = hist.iter().sum();
    let value = hist
        .iter()
        .enumerate()
        .map(|(s, &c)| c as f64 * x.powi(s as i32))
        .sum::<f64>()
        / total as f64;
    Ok(value)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MapPosterior {
    /// Number of ordered K-paths through each vertex.
    pub scores: Vec<u64>,
    /// The K best-scoring vertices (lowest index on ties), sorted.
    pub top: Vec<usize>,
}

/// Posterior-mode estimate of the planted line: rank vertices by the number
/// of K-paths through them.
pub fn map_posterior_line(g: &Graph, k: usize, budget: &mut Budget) -> Result<MapPosterior> {
    if k < 2 || k > g.n() {
        return Err(Error::param(format!("need 2 <= K <= n, got K = {k}")));
    }
    let mut scores = vec![0u64; g.n()];
    for_each_k_path(g, k, budget, |path| {
        for &v in path {
            scores[v] += 1;
        }
    })?;
    let mut ranked: Vec<usize> = (0..g.n()).collect();
    ranked.sort_by(|&a, &b| scores[b].cmp(&scores[a]).then(a.cmp(&b)));
    let mut top = ranked[..k].to_vec();
    top.sort_unstable();
    Ok(MapPosterior { scores, top })
}
