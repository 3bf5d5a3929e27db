// SPDX-License-Identifier: MIT OR Apache-2.0

//! JSON documents written by the CLI.

use serde::{Deserialize, Serialize};
use wildseg_core::signals::SignalDescriptor;
use wildseg_core::{Interval, PathNode};

/// Bumped whenever a field changes meaning or disappears.
pub const SCHEMA_VERSION: &str = "1.0.0";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectOutput {
    pub schema_version: String,
    #[serde(rename = "T")]
    pub len: usize,
    /// 1-based; a change-point at `b` ends a segment at `b`.
    pub change_points: Vec<usize>,
    pub fitted_means: Vec<f64>,
    pub sigma_hat: Option<f64>,
    pub method: MethodInfo,
    pub solution_path: Vec<PathEntry>,
    /// Present for sSIC stopping only.
    pub k_hat: Option<usize>,
    pub boundary_hit: Option<bool>,
    pub refined: bool,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodInfo {
    pub method: String,
    pub stopping: String,
    #[serde(rename = "C")]
    pub c: Option<f64>,
    pub alpha: Option<f64>,
    #[serde(rename = "K")]
    pub k: Option<usize>,
    #[serde(rename = "M")]
    pub m: usize,
    pub seed: u64,
    pub augment: bool,
    pub zeta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathEntry {
    pub location: usize,
    pub magnitude: f64,
    pub survival_threshold: f64,
    pub generating_interval: Interval,
    pub order: usize,
}

impl From<&PathNode> for PathEntry {
    fn from(n: &PathNode) -> Self {
        Self {
            location: n.location,
            magnitude: n.magnitude,
            survival_threshold: n.survival_threshold,
            generating_interval: n.generating_interval,
            order: n.order,
        }
    }
}

/// Ground truth written next to a simulated series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruthOutput {
    pub schema_version: String,
    pub model: String,
    pub seed: u64,
    #[serde(flatten)]
    pub signal: SignalDescriptor,
}
