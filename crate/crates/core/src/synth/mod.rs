//! Ground-truth network generation and dataset sampling.

mod config;
mod dataset;
mod generators;
mod levels;
mod network;
mod sampling;

use thiserror::Error;

pub use config::{edge_band, EdgeBand, StructureType, SynthesisConfig};
pub use dataset::{Dataset, DatasetError, DatasetSidecar};
pub use generators::gen_dag;
pub use levels::assign_levels;
pub use network::{parameterize, sample_dirichlet, Cpt, DiscreteBayesNet, NetworkError};
pub use sampling::forward_sample;
pub(crate) use sampling::draw_level;

use crate::graph::Dag;
use crate::scalar::Real;
use rand::Rng;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SynthError {
    #[error(
        "could not hit the edge band [{}, {}] for {structure_type} with {num_variables} variables \
         and complexity {complexity} after {attempts} attempts",
        band.min, band.max
    )]
    CalibrationFailed {
        structure_type: StructureType,
        num_variables: usize,
        complexity: u32,
        band: EdgeBand,
        attempts: usize,
    },
    #[error("invalid synthesis configuration: {0}")]
    InvalidConfig(String),
}

/// Ground truth and sampled data for one configuration.
#[derive(Debug, Clone)]
pub struct SyntheticInstance<T: Real> {
    pub network: DiscreteBayesNet<T>,
    pub dataset: Dataset,
}

/// Runs the full pipeline: structure, levels, CPTs, samples, all from one RNG stream.
pub fn synthesize<T: Real, R: Rng + ?Sized>(
    config: &SynthesisConfig,
    rng: &mut R,
) -> Result<SyntheticInstance<T>, SynthError> {
    config.validate()?;
    let dag: Dag =
        gen_dag(config.structure_type, config.num_variables, config.complexity, rng)?;
    let cardinalities = assign_levels(config.num_variables, config.avg_levels, rng);
    let network = parameterize::<T, R>(&dag, &cardinalities, config.alpha, rng);
    let dataset = forward_sample(&network, config.num_samples, rng);
    Ok(SyntheticInstance { network, dataset })
}
