//! Structural precision/recall, interventional inference and PCOR.

mod fit;
mod inference;
mod pcor;
mod structural;

pub use fit::fit_parameters;
pub use inference::{
    clamped_logit, exact_interventional_dist, interventional_dist, interventional_dists, interventional_odds_ratio,
    monte_carlo_interventional_dists, Inference, InferenceError, FALLBACK_SAMPLES, MAX_ELIMINATION_WIDTH,
    MAX_FACTOR_CELLS, ODDS_CLAMP,
};
pub use pcor::{log_or_agrees, pcor, pcor_summary, PcorConfig, PcorError, PcorSummary};
pub use structural::{precision_recall, skeleton_pr, structural_metrics, vstructure_pr, StructuralMetrics};
