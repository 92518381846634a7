// SPDX-License-Identifier: Apache-2.0

//! Detection tests for planted structures.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

mod components;
mod dary;
mod paths;
mod star;

pub use components::component_count_test;
pub use dary::{dary_height_messages, dary_test, ball_is_acyclic, DaryHeights};
pub use paths::{k_path_test, k_path_test_with_budget, longest_path, LongestPath, DEFAULT_PATH_BUDGET};
pub use star::star_test;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TestKind {
    Components,
    #[serde(rename = "kpath")]
    KPath,
    Star,
    Dary,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Decision {
    H0,
    H1,
}

impl Decision {
    pub fn from_rejects(reject_null: bool) -> Self {
        if reject_null {
            Decision::H1
        } else {
            Decision::H0
        }
    }

    pub fn is_h1(self) -> bool {
        self == Decision::H1
    }
}

/// Outcome of a detection test. Serializes as
/// `{"test": ..., "decision": "H0"|"H1", "exact": bool, "stats": {...}}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectionResult {
    pub test: TestKind,
    pub decision: Decision,
    pub exact: bool,
    pub stats: BTreeMap<String, f64>,
}

impl DetectionResult {
    pub(crate) fn new(test: TestKind, decision: Decision, exact: bool) -> Self {
        DetectionResult {
            test,
            decision,
            exact,
            stats: BTreeMap::new(),
        }
    }

    pub(crate) fn with(mut self, key: &str, value: f64) -> Self {
        self.stats.insert(key.to_owned(), value);
        self
    }

    pub fn stat(&self, key: &str) -> Option<f64> {
        self.stats.get(key).copied()
    }
}
