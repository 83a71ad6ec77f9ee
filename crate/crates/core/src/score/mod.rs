//! Decomposable BDeu scoring and the G² conditional-independence test.

mod bdeu;
mod counts;
mod g2;

pub use bdeu::{bdeu_from_counts, local_bdeu, network_bdeu, BdeuScorer, ScoreConfig};
pub use counts::{ContingencyCounts, CountRow};
pub use g2::{g2_test, CiTestError, G2Result, MIN_SAMPLES_PER_CELL};
