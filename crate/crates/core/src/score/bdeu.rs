use std::cell::RefCell;
use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::ContingencyCounts;
use crate::graph::Dag;
use crate::scalar::Real;
use crate::special::ln_gamma;
use crate::synth::Dataset;

/// BDeu prior settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScoreConfig {
    /// Total pseudo-count of the Dirichlet prior.
    pub equivalent_sample_size: f64,
}

impl Default for ScoreConfig {
    fn default() -> Self {
        ScoreConfig { equivalent_sample_size: 1.0 }
    }
}

/// BDeu log marginal likelihood of one family from its counts.
///
/// `Σ_j [lnΓ(a_j) - lnΓ(a_j + N_j)] + Σ_jk [lnΓ(a_jk + N_jk) - lnΓ(a_jk)]`
/// with `a_j = ess / q` and `a_jk = ess / (q r)`. Unobserved configurations
/// and zero cells contribute nothing.
pub fn bdeu_from_counts<T: Real>(counts: &ContingencyCounts, equivalent_sample_size: f64) -> T {
    let q = counts.parent_config_count() as f64;
    let r = counts.child_cardinality() as f64;
    let a_j = T::of(equivalent_sample_size / q);
    let a_jk = T::of(equivalent_sample_size / (q * r));
    let ln_a_j = ln_gamma(a_j);
    let ln_a_jk = ln_gamma(a_jk);
    let mut score = T::zero();
    for row in counts.rows() {
        score += ln_a_j - ln_gamma(a_j + T::of(row.total as f64));
        for &n in row.counts.iter().filter(|&&n| n > 0) {
            score += ln_gamma(a_jk + T::of(n as f64)) - ln_a_jk;
        }
    }
    score
}

/// BDeu score of `child` with the given parent set.
pub fn local_bdeu<T: Real>(data: &Dataset, child: usize, parents: &[usize], config: &ScoreConfig) -> T {
    debug_assert!(!parents.contains(&child));
    bdeu_from_counts(&ContingencyCounts::family(data, child, parents), config.equivalent_sample_size)
}

/// Sum of the local scores of every family of `dag`.
pub fn network_bdeu<T: Real>(data: &Dataset, dag: &Dag, config: &ScoreConfig) -> T {
    assert_eq!(dag.node_count(), data.num_variables(), "graph and data disagree on variable count");
    (0..dag.node_count()).map(|v| local_bdeu::<T>(data, v, dag.parents(v), config)).sum()
}

/// Local BDeu scores memoized by `(child, sorted parent set)` for one learner run.
pub struct BdeuScorer<'a> {
    data: &'a Dataset,
    config: ScoreConfig,
    cache: RefCell<HashMap<(usize, Vec<usize>), f64>>,
}

impl<'a> BdeuScorer<'a> {
    pub fn new(data: &'a Dataset, config: ScoreConfig) -> Self {
        BdeuScorer { data, config, cache: RefCell::new(HashMap::new()) }
    }

    pub fn data(&self) -> &'a Dataset {
        self.data
    }

    /// Score of `child` given `parents` (any order, no duplicates).
    pub fn local(&self, child: usize, parents: &[usize]) -> f64 {
        let mut key = parents.to_vec();
        key.sort_unstable();
        let key = (child, key);
        if let Some(&s) = self.cache.borrow().get(&key) {
            return s;
        }
        let s = local_bdeu::<f64>(self.data, child, &key.1, &self.config);
        self.cache.borrow_mut().insert(key, s);
        s
    }

    pub fn network(&self, dag: &Dag) -> f64 {
        (0..dag.node_count()).map(|v| self.local(v, dag.parents(v))).sum()
    }

    /// Number of distinct families scored so far.
    pub fn evaluations(&self) -> usize {
        self.cache.borrow().len()
    }
}
