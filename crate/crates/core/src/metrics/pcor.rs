use std::collections::BTreeMap;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::fit::fit_parameters;
use super::inference::{clamped_logit, interventional_dists, Inference, MAX_FACTOR_CELLS};
use crate::graph::{cpdag_to_dag, Cpdag, Dag, GraphError};
use crate::scalar::Real;
use crate::synth::{Dataset, DiscreteBayesNet};

/// Settings of the interventional odds-ratio comparison.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PcorConfig {
    /// Most (intervention, outcome) pairs evaluated; larger pools are subsampled.
    pub pair_budget: usize,
    /// `|ln OR|` below this counts as no effect.
    pub direction_epsilon: f64,
    /// Largest accepted `|ln OR_true - ln OR_learned|`.
    pub tolerance_log_or: f64,
    pub inference: Inference,
    pub seed: u64,
}

impl Default for PcorConfig {
    fn default() -> Self {
        PcorConfig {
            pair_budget: 50,
            direction_epsilon: 0.05,
            tolerance_log_or: std::f64::consts::LN_2,
            inference: Inference::Exact,
            seed: 0,
        }
    }
}

impl PcorConfig {
    pub fn validate(&self) -> Result<(), PcorError> {
        let bad = |m: &str| Err(PcorError::InvalidConfig(m.into()));
        if self.pair_budget == 0 {
            return bad("pair_budget must be at least 1");
        }
        if !(self.direction_epsilon >= 0.0 && self.tolerance_log_or >= 0.0) {
            return bad("direction_epsilon and tolerance_log_or must be non-negative");
        }
        if let Inference::MonteCarlo { samples: 0 } = self.inference {
            return bad("Monte Carlo inference needs at least one sample");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PcorError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("node {node}: fitted table would have {cells} entries")]
    TableTooLarge { node: usize, cells: u128 },
    #[error("dataset and network disagree on cardinalities")]
    CardinalityMismatch,
    #[error("invalid PCOR configuration: {0}")]
    InvalidConfig(String),
}

/// Outcome of a PCOR evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PcorSummary {
    /// Fraction of correct combinations; 1 when there is nothing to compare.
    pub value: f64,
    pub pairs: usize,
    pub combinations: usize,
    pub correct: usize,
}

/// Whether a learned log odds ratio agrees with the true one.
pub fn log_or_agrees(truth: f64, learned: f64, config: &PcorConfig) -> bool {
    let both_null = truth.abs() < config.direction_epsilon && learned.abs() < config.direction_epsilon;
    let same_sign = truth * learned > 0.0;
    both_null || (same_sign && (truth - learned).abs() <= config.tolerance_log_or)
}

/// Proportion of correct interventional odds ratios of `learned` against `truth`.
pub fn pcor<T: Real>(
    truth: &DiscreteBayesNet<T>,
    learned: &Cpdag,
    data: &Dataset,
    config: &PcorConfig,
) -> Result<f64, PcorError> {
    pcor_summary(truth, learned, data, config).map(|s| s.value)
}

/// [`pcor`] with the counts behind it.
///
/// The learned class is extended to a DAG whose CPTs are fitted from `data`
/// (pseudo-count 1). Candidate pairs `(x, y)` are those where `x` is an
/// ancestor of `y` in the true DAG or in the extension. For every
/// non-reference level of `x` (reference level 0) and every level `k` of
/// `y`, the odds ratios of the event `y = k` are compared.
pub fn pcor_summary<T: Real>(
    truth: &DiscreteBayesNet<T>,
    learned: &Cpdag,
    data: &Dataset,
    config: &PcorConfig,
) -> Result<PcorSummary, PcorError> {
    config.validate()?;
    if truth.cardinalities() != data.cardinalities().as_slice() || learned.node_count() != truth.node_count() {
        return Err(PcorError::CardinalityMismatch);
    }
    let dag = cpdag_to_dag(learned)?;
    let cards = truth.cardinalities();
    for v in 0..dag.node_count() {
        let cells = dag.parents(v).iter().fold(cards[v] as u128, |a, &p| a.saturating_mul(cards[p] as u128));
        if cells > MAX_FACTOR_CELLS as u128 {
            return Err(PcorError::TableTooLarge { node: v, cells });
        }
    }
    let fitted: DiscreteBayesNet<f64> = fit_parameters(&dag, data, 1.0);
    let truth = truth.cast::<f64>();

    let pairs = candidate_pairs(truth.dag(), &dag, config);
    let mut by_intervention: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for &(x, y) in &pairs {
        by_intervention.entry(x).or_default().push(y);
    }
    let mut combinations = 0;
    let mut correct = 0;
    for (&x, outcomes) in &by_intervention {
        let dists = |bn: &DiscreteBayesNet<f64>, level: usize| {
            interventional_dists(bn, outcomes, x, level, config.inference, config.seed)
        };
        let (true_ref, learned_ref) = (dists(&truth, 0), dists(&fitted, 0));
        for level in 1..cards[x] {
            let (true_at, learned_at) = (dists(&truth, level), dists(&fitted, level));
            for i in 0..outcomes.len() {
                for k in 0..cards[outcomes[i]] {
                    let t = clamped_logit(true_at[i][k]) - clamped_logit(true_ref[i][k]);
                    let l = clamped_logit(learned_at[i][k]) - clamped_logit(learned_ref[i][k]);
                    combinations += 1;
                    correct += usize::from(log_or_agrees(t, l, config));
                }
            }
        }
    }
    let value = if combinations == 0 { 1.0 } else { correct as f64 / combinations as f64 };
    Ok(PcorSummary { value, pairs: pairs.len(), combinations, correct })
}

fn candidate_pairs(truth: &Dag, learned: &Dag, config: &PcorConfig) -> Vec<(usize, usize)> {
    let n = truth.node_count();
    let mut pairs = Vec::new();
    for y in 0..n {
        let (ta, la) = (truth.ancestors(y), learned.ancestors(y));
        for x in 0..n {
            if x != y && (ta[x] || la[x]) {
                pairs.push((x, y));
            }
        }
    }
    pairs.sort_unstable();
    if pairs.len() > config.pair_budget {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let mut keep = sample(&mut rng, pairs.len(), config.pair_budget).into_vec();
        keep.sort_unstable();
        pairs = keep.into_iter().map(|i| pairs[i]).collect();
    }
    pairs
}
