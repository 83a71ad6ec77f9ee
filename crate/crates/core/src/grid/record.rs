use serde::{Deserialize, Serialize};

use crate::learn::{LearnStats, LearnerConfig};
use crate::metrics::{PcorConfig, PcorSummary, StructuralMetrics};
use crate::synth::SynthesisConfig;

/// Version of the results-store line format.
pub const SCHEMA_VERSION: u32 = 1;

pub const TOOL_VERSION: &str = concat!("causal-datasheet ", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RecordStatus {
    Ok,
    Timeout,
    Failed(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PcorOutcome {
    Measured(PcorSummary),
    Failed(String),
}

impl PcorOutcome {
    pub fn value(&self) -> Option<f64> {
        match self {
            PcorOutcome::Measured(s) => Some(s.value),
            PcorOutcome::Failed(_) => None,
        }
    }
}

/// Result of one algorithm on one synthetic dataset; one line of the results store.
///
/// `metrics` and `learn_stats` are present exactly when `status` is `Ok`.
/// `pcor` is present for `Ok` records and may itself be a failure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub schema_version: u32,
    pub config: SynthesisConfig,
    pub replicate: u32,
    pub algorithm: LearnerConfig,
    pub pcor_config: PcorConfig,
    pub status: RecordStatus,
    pub metrics: Option<StructuralMetrics>,
    pub pcor: Option<PcorOutcome>,
    pub learn_stats: Option<LearnStats>,
    /// Edges of the ground-truth DAG; absent if synthesis failed.
    pub true_edges: Option<usize>,
    /// Wall-clock time of the learner alone.
    pub runtime_seconds: f64,
    pub tool_version: String,
}

impl ExperimentRecord {
    /// Identity of the `(config, replicate, algorithm)` cell.
    pub fn key(&self) -> String {
        record_key(&self.config, self.replicate, &self.algorithm)
    }

    /// The JSON line with the runtime zeroed: equal for reruns of the same cell.
    pub fn canonical_json(&self) -> String {
        let mut r = self.clone();
        r.runtime_seconds = 0.0;
        serde_json::to_string(&r).expect("records serialize")
    }
}

/// Identity of a `(config, replicate, algorithm)` cell in the results store.
pub fn record_key(config: &SynthesisConfig, replicate: u32, algorithm: &LearnerConfig) -> String {
    serde_json::to_string(&(config, replicate, algorithm)).expect("keys serialize")
}
