//! Causal datasheets: expected learner performance for a dataset's observable
//! characteristics, with recommendations.

mod aggregate;
mod extract;
mod recommend;
mod render;

use std::collections::HashSet;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use aggregate::{
    aggregate, nearest, round_levels, Aggregate, AlgorithmStats, Cell, MatchedCell, MatchingRule, MetricStats,
    Summary, TrendPoint,
};
pub use extract::{extract_characteristics, extract_from_reader, ObservableCharacteristics, Warning};
pub use recommend::{recommend, Recommendation, Rule, HIGH_SKELETON_PRECISION, LOW_RECALL};
pub use render::{render, request_id, Rendered};

use crate::grid::{
    enumerate_grid, load_records, run_grid, run_in_memory, GridError, GridProgress, GridSpec, RunOptions,
    TOOL_VERSION,
};
use crate::learn::{Algorithm, LearnerConfig};
use crate::metrics::PcorConfig;
use crate::synth::{StructureType, SynthesisConfig};

#[derive(Debug, Error)]
pub enum DatasheetError {
    #[error("malformed CSV: {0}")]
    MalformedCsv(String),
    #[error("invalid datasheet request: {0}")]
    InvalidRequest(String),
    #[error("no experiment records to aggregate")]
    NoRecords,
    #[error(
        "no records at samples={}, variables={}, levels={}; nearest available cells: {}",
        wanted.num_samples, wanted.num_variables, wanted.avg_levels,
        nearest.iter().map(|c| format!("({}, {}, {})", c.num_samples, c.num_variables, c.avg_levels))
            .collect::<Vec<_>>().join(", ")
    )]
    NoMatchingRecords { wanted: Cell, nearest: Vec<Cell> },
    #[error(transparent)]
    Grid(#[from] GridError),
}

/// Non-observable values swept when experiments are run for the query itself.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OnDemandSweep {
    pub alphas: Vec<f64>,
    pub complexities: Vec<u32>,
    pub structure_types: Vec<StructureType>,
    pub replicates: u32,
    pub algorithms: Vec<LearnerConfig>,
    pub global_seed: u64,
    pub pcor: PcorConfig,
}

impl Default for OnDemandSweep {
    fn default() -> Self {
        OnDemandSweep {
            alphas: vec![1.0, 10.0, 50.0, 100.0],
            complexities: vec![1, 2, 3],
            structure_types: StructureType::ALL.to_vec(),
            replicates: 3,
            algorithms: Algorithm::ALL.iter().map(|&a| LearnerConfig::new(a)).collect(),
            global_seed: 0,
            pcor: PcorConfig::default(),
        }
    }
}

impl OnDemandSweep {
    /// The grid of this sweep at the query's observable cell.
    pub fn grid(&self, observables: &ObservableCharacteristics) -> GridSpec {
        GridSpec {
            samples: vec![observables.num_samples],
            variables: vec![observables.num_variables],
            alphas: self.alphas.clone(),
            complexities: self.complexities.clone(),
            structure_types: self.structure_types.clone(),
            avg_levels: vec![round_levels(observables.avg_levels)],
            replicates: self.replicates,
            algorithms: self.algorithms.clone(),
            global_seed: self.global_seed,
            pcor: self.pcor,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Nearest cell of a precomputed results store.
    Lookup { results_path: PathBuf },
    /// Fresh experiments at exactly the query cell.
    OnDemand(OnDemandSweep),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasheetRequest {
    pub observables: ObservableCharacteristics,
    pub pcor_threshold: f64,
    pub mode: Mode,
}

impl DatasheetRequest {
    pub fn validate(&self) -> Result<(), DatasheetError> {
        self.observables.validate()?;
        if !(0.0..=1.0).contains(&self.pcor_threshold) {
            return Err(DatasheetError::InvalidRequest(format!(
                "pcor threshold must lie in [0, 1], got {}",
                self.pcor_threshold
            )));
        }
        if let Mode::OnDemand(sweep) = &self.mode {
            sweep.grid(&self.observables).validate()?;
        }
        Ok(())
    }
}

/// Heuristic cut-offs used by the recommendation rules.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    pub pcor: f64,
    pub high_skeleton_precision: f64,
    pub low_recall: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub tool_version: String,
    pub thresholds: Thresholds,
    pub pcor_configs: Vec<PcorConfig>,
    /// Every synthetic dataset pooled, with its seed.
    pub configs: Vec<SynthesisConfig>,
    pub records: usize,
    pub sample_trend: std::collections::BTreeMap<String, Vec<TrendPoint>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Datasheet {
    pub request: DatasheetRequest,
    pub warnings: Vec<Warning>,
    pub matched: MatchedCell,
    pub algorithms: Vec<AlgorithmStats>,
    pub recommendations: Vec<Recommendation>,
    pub provenance: Provenance,
}

/// Execution settings that do not change the result.
#[derive(Debug, Clone, Default)]
pub struct BuildOptions {
    /// Worker threads for on-demand runs; 0 uses the available parallelism.
    pub jobs: usize,
    /// Results store that on-demand runs append to and resume from.
    pub store: Option<PathBuf>,
}

/// Collects the records for `request` and assembles the datasheet.
pub fn build_datasheet(
    request: &DatasheetRequest,
    warnings: Vec<Warning>,
    options: &BuildOptions,
    progress: impl FnMut(&GridProgress),
) -> Result<Datasheet, DatasheetError> {
    request.validate()?;
    let (records, rule) = match &request.mode {
        Mode::Lookup { results_path } => (load_records(results_path)?, MatchingRule::Nearest),
        Mode::OnDemand(sweep) => {
            let spec = sweep.grid(&request.observables);
            let records = match &options.store {
                None => run_in_memory(&spec, options.jobs, progress),
                Some(path) => {
                    run_grid(&spec, &RunOptions { jobs: options.jobs, resume: true }, path, progress)?;
                    let keys: HashSet<String> = enumerate_grid(&spec)
                        .iter()
                        .flat_map(|e| {
                            spec.algorithms.iter().map(move |a| crate::grid::record_key(&e.config, e.replicate, a))
                        })
                        .collect();
                    load_records(path)?.into_iter().filter(|r| keys.contains(&r.key())).collect()
                }
            };
            (records, MatchingRule::Exact)
        }
    };
    let stats = aggregate(&records, &request.observables, rule)?;
    let recommendations = recommend(&stats, request.pcor_threshold);
    let records = stats.algorithms.iter().map(|a| a.records).sum();
    Ok(Datasheet {
        request: request.clone(),
        warnings,
        matched: stats.matched,
        recommendations,
        provenance: Provenance {
            tool_version: TOOL_VERSION.to_string(),
            thresholds: Thresholds {
                pcor: request.pcor_threshold,
                high_skeleton_precision: HIGH_SKELETON_PRECISION,
                low_recall: LOW_RECALL,
            },
            pcor_configs: stats.pcor_configs,
            configs: stats.configs,
            records,
            sample_trend: stats.sample_trend,
        },
        algorithms: stats.algorithms,
    })
}
