// SPDX-License-Identifier: Apache-2.0

use super::{Decision, DetectionResult, TestKind};
use crate::error::{Error, Result};
use crate::graph::{component_labels, Graph};

/// Small-component counting test.
///
/// Counts isolated vertices (`A1`), isolated edges (`A2`) and connected
/// three-vertex components, paths or triangles (`A3`); estimates
/// `lambda_hat = n A3 / (A1 A2)` and the number of vertices in the hidden
/// structure `k_hat = n - exp(lambda_hat) A1`, and rejects the null when
/// `k_hat >= sqrt(K sqrt(n))`.
///
/// When `A1 A2 = 0` the edge-density estimate `2|E|/n` is used for
/// `lambda_hat` and the stat `fallback` is set to 1.
pub fn component_count_test(g: &Graph, k: usize) -> Result<DetectionResult> {
    if g.n() == 0 || k == 0 {
        return Err(Error::param("component test needs n >= 1 and K >= 1"));
    }
    let labels = component_labels(g);
    let count = labels.iter().map(|&l| l + 1).max().unwrap_or(0);
    let mut sizes = vec![0usize; count];
    for &l in &labels {
        sizes[l] += 1;
    }
    let mut a = [0usize; 4];
    for &s in &sizes {
        if s <= 3 {
            a[s] += 1;
        }
    }
    let (a1, a2, a3) = (a[1] as f64, a[2] as f64, a[3] as f64);
    let n = g.n() as f64;
    let fallback = a1 * a2 == 0.0;
    let lambda_hat = if fallback {
        2.0 * g.edge_count() as f64 / n
    } else {
        n * a3 / (a1 * a2)
    };
    let k_hat = n - lambda_hat.exp() * a1;
    let threshold = (k as f64 * n.sqrt()).sqrt();
    Ok(
        DetectionResult::new(TestKind::Components, Decision::from_rejects(k_hat >= threshold), true)
            .with("A1", a1)
            .with("A2", a2)
            .with("A3", a3)
            .with("lambda_hat", lambda_hat)
            .with("k_hat", k_hat)
            .with("threshold", threshold)
            .with("fallback", if fallback { 1.0 } else { 0.0 }),
    )
}
