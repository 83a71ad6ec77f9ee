//! Experiment grids: enumeration, execution and the resumable results store.

mod record;
mod runner;
mod spec;
mod store;

use std::io;
use std::path::PathBuf;

use thiserror::Error;

pub use record::{record_key, ExperimentRecord, PcorOutcome, RecordStatus, SCHEMA_VERSION, TOOL_VERSION};
pub use runner::{run_experiment, run_grid, run_in_memory, GridProgress, GridSummary, RunOptions, StatusCounts};
pub use spec::{enumerate_grid, experiment_seed, GridEntry, GridSpec};
pub use store::{load_records, ResultStore};

#[derive(Debug, Error)]
pub enum GridError {
    #[error("grid spec is not valid JSON at line {line}, column {column}: {message}")]
    SpecParse { line: usize, column: usize, message: String },
    #[error("invalid grid spec: {0}")]
    InvalidSpec(String),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("results store line {line} is not a valid record: {message}")]
    CorruptStore { line: usize, message: String },
}
