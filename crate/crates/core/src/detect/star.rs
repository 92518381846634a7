// SPDX-License-Identifier: Apache-2.0

use super::{Decision, DetectionResult, TestKind};
use crate::error::{Error, Result};
use crate::graph::Graph;

/// Rejects the null iff some vertex has degree at least `K`.
pub fn star_test(g: &Graph, k: usize) -> Result<DetectionResult> {
    if k == 0 {
        return Err(Error::param("star test needs K >= 1"));
    }
    let (deg, argmax) = g.max_degree().unwrap_or((0, 0));
    Ok(DetectionResult::new(TestKind::Star, Decision::from_rejects(deg >= k), true)
        .with("max_degree", deg as f64)
        .with("argmax", argmax as f64)
        .with("threshold", k as f64))
}
