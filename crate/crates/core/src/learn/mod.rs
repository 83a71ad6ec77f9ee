//! Structure learners: PC (constraint-based), GES (score-based) and MMHC (hybrid).

mod ges;
mod mmhc;
mod pc;

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{cpdag_to_dag, dag_to_cpdag, force_extension, Cpdag};
use crate::score::ScoreConfig;
use crate::synth::Dataset;

pub use ges::learn_ges;
pub use mmhc::learn_mmhc;
pub use pc::learn_pc;

/// Gains at or below this are treated as no improvement by the score-based searches.
pub const SCORE_EPSILON: f64 = 1e-9;

/// Gains closer than this are ties (score-equivalent moves differ only by rounding).
pub const SCORE_TIE_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    Pc,
    Ges,
    Mmhc,
}

impl Algorithm {
    pub const ALL: [Algorithm; 3] = [Algorithm::Pc, Algorithm::Ges, Algorithm::Mmhc];

    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::Pc => "pc",
            Algorithm::Ges => "ges",
            Algorithm::Mmhc => "mmhc",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "pc" => Ok(Algorithm::Pc),
            "ges" | "fges" => Ok(Algorithm::Ges),
            "mmhc" => Ok(Algorithm::Mmhc),
            other => Err(format!("unknown algorithm `{other}` (expected pc, ges or mmhc)")),
        }
    }
}

/// Algorithm choice plus every hyper-parameter that influences its output.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LearnerConfig {
    pub algorithm: Algorithm,
    #[serde(default)]
    pub score: ScoreConfig,
    #[serde(default = "default_significance")]
    pub significance: f64,
    #[serde(default = "default_max_conditioning_size")]
    pub max_conditioning_size: usize,
    #[serde(default = "default_max_parents")]
    pub max_parents: usize,
    #[serde(default = "default_time_budget")]
    pub time_budget_seconds: Option<f64>,
}

fn default_significance() -> f64 {
    0.05
}
fn default_max_conditioning_size() -> usize {
    3
}
fn default_max_parents() -> usize {
    8
}
fn default_time_budget() -> Option<f64> {
    Some(3600.0)
}

impl LearnerConfig {
    pub fn new(algorithm: Algorithm) -> Self {
        LearnerConfig {
            algorithm,
            score: ScoreConfig::default(),
            significance: default_significance(),
            max_conditioning_size: default_max_conditioning_size(),
            max_parents: default_max_parents(),
            time_budget_seconds: default_time_budget(),
        }
    }

    pub fn validate(&self) -> Result<(), LearnError> {
        let bad = |m: String| Err(LearnError::InvalidConfig(m));
        if !(self.significance > 0.0 && self.significance < 1.0) {
            return bad(format!("significance must lie in (0, 1), got {}", self.significance));
        }
        if !(self.score.equivalent_sample_size > 0.0 && self.score.equivalent_sample_size.is_finite()) {
            return bad(format!("equivalent sample size must be positive, got {}", self.score.equivalent_sample_size));
        }
        if let Some(t) = self.time_budget_seconds {
            if !(t > 0.0) {
                return bad(format!("time budget must be positive, got {t}"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LearnError {
    #[error("time budget of {budget_seconds} s exceeded")]
    Timeout { budget_seconds: f64 },
    #[error("invalid learner configuration: {0}")]
    InvalidConfig(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

/// Work counters reported alongside a learned graph.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LearnStats {
    pub ci_tests: usize,
    /// Tests skipped for too few samples per cell (treated as independence).
    pub insufficient_data: usize,
    pub score_evaluations: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LearnOutput {
    pub cpdag: Cpdag,
    pub stats: LearnStats,
}

/// Runs the configured algorithm.
pub fn learn(data: &Dataset, config: &LearnerConfig) -> Result<LearnOutput, LearnError> {
    match config.algorithm {
        Algorithm::Pc => learn_pc(data, config),
        Algorithm::Ges => learn_ges(data, config),
        Algorithm::Mmhc => learn_mmhc(data, config),
    }
}

fn check_input(data: &Dataset, config: &LearnerConfig) -> Result<(), LearnError> {
    config.validate()?;
    if data.num_variables() < 2 {
        return Err(LearnError::InvalidInput(format!(
            "structure learning needs at least 2 variables, got {}",
            data.num_variables()
        )));
    }
    Ok(())
}

/// Cooperative wall-clock budget polled from the learners' inner loops.
#[derive(Debug, Clone, Copy)]
struct Deadline {
    end: Option<Instant>,
    budget_seconds: f64,
}

impl Deadline {
    fn new(budget_seconds: Option<f64>) -> Self {
        match budget_seconds {
            Some(b) => Deadline {
                end: Instant::now().checked_add(Duration::from_secs_f64(b.min(1e12))),
                budget_seconds: b,
            },
            None => Deadline { end: None, budget_seconds: f64::INFINITY },
        }
    }

    fn check(&self) -> Result<(), LearnError> {
        match self.end {
            Some(end) if Instant::now() >= end => Err(LearnError::Timeout { budget_seconds: self.budget_seconds }),
            _ => Ok(()),
        }
    }
}

/// Turns a PDAG into the CPDAG of one of its consistent extensions. PDAGs
/// without an extension (possible after conflicting PC orientations) go
/// through the relaxed extension instead.
fn complete(pdag: &Cpdag) -> Cpdag {
    let dag = cpdag_to_dag(pdag).unwrap_or_else(|_| force_extension(pdag));
    dag_to_cpdag(&dag)
}

/// The valid candidate with the largest gain, where gains within
/// [`SCORE_TIE_TOLERANCE`] of the best valid gain tie and the smallest key wins.
fn pick_best<C, K: Ord>(
    mut candidates: Vec<C>,
    gain: impl Fn(&C) -> f64,
    key: impl Fn(&C) -> K,
    mut valid: impl FnMut(&C) -> bool,
) -> Option<C> {
    candidates.sort_by(|a, b| gain(b).total_cmp(&gain(a)).then_with(|| key(a).cmp(&key(b))));
    let first = candidates.iter().position(&mut valid)?;
    let floor = gain(&candidates[first]) - SCORE_TIE_TOLERANCE;
    let mut best = first;
    for i in first + 1..candidates.len() {
        if gain(&candidates[i]) < floor {
            break;
        }
        if key(&candidates[i]) < key(&candidates[best]) && valid(&candidates[i]) {
            best = i;
        }
    }
    Some(candidates.swap_remove(best))
}

/// All `k`-subsets of `items` in lexicographic order of positions.
fn subsets_of_size(items: &[usize], k: usize) -> impl Iterator<Item = Vec<usize>> + '_ {
    let n = items.len();
    let mut idx: Option<Vec<usize>> = (k <= n).then(|| (0..k).collect());
    std::iter::from_fn(move || {
        let current = idx.as_mut()?;
        let out: Vec<usize> = current.iter().map(|&i| items[i]).collect();
        // advance to the next combination
        let mut i = k;
        loop {
            if i == 0 {
                idx = None;
                break;
            }
            i -= 1;
            if current[i] < n - k + i {
                current[i] += 1;
                for j in i + 1..k {
                    current[j] = current[j - 1] + 1;
                }
                break;
            }
        }
        Some(out)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subsets_are_lexicographic() {
        let items = [4, 7, 9];
        let all: Vec<Vec<usize>> = subsets_of_size(&items, 2).collect();
        assert_eq!(all, vec![vec![4, 7], vec![4, 9], vec![7, 9]]);
        assert_eq!(subsets_of_size(&items, 0).collect::<Vec<_>>(), vec![Vec::<usize>::new()]);
        assert_eq!(subsets_of_size(&items, 4).count(), 0);
        assert_eq!(subsets_of_size(&[1, 2, 3, 4, 5, 6], 3).count(), 20);
    }

    #[test]
    fn near_ties_go_to_the_smallest_key() {
        let c = vec![(5.0, 3), (5.0 + 1e-9, 7), (5.0 - 1e-9, 1), (4.0, 0)];
        assert_eq!(pick_best(c.clone(), |c| c.0, |c| c.1, |_| true), Some((5.0 - 1e-9, 1)));
        assert_eq!(pick_best(c.clone(), |c| c.0, |c| c.1, |c| c.1 != 1), Some((5.0, 3)));
        assert_eq!(pick_best(c.clone(), |c| c.0, |c| c.1, |c| c.1 == 0), Some((4.0, 0)));
        assert_eq!(pick_best(c, |c| c.0, |c| c.1, |_| false), None);
    }

    #[test]
    fn config_json_defaults() {
        let c: LearnerConfig = serde_json::from_str(r#"{"algorithm":"ges"}"#).unwrap();
        assert_eq!(c, LearnerConfig::new(Algorithm::Ges));
        assert!(LearnerConfig { significance: 1.0, ..c }.validate().is_err());
        assert_eq!("FGES".parse::<Algorithm>().unwrap(), Algorithm::Ges);
    }

    #[test]
    fn deadline_expires() {
        let d = Deadline::new(Some(1e-9));
        std::thread::sleep(Duration::from_millis(1));
        assert!(matches!(d.check(), Err(LearnError::Timeout { .. })));
        assert!(Deadline::new(None).check().is_ok());
    }
}
