use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{DatasheetError, ObservableCharacteristics};
use crate::grid::{ExperimentRecord, RecordStatus};
use crate::learn::LearnerConfig;
use crate::metrics::PcorConfig;
use crate::synth::SynthesisConfig;

/// How records are matched to the query characteristics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MatchingRule {
    /// Nearest available value on each observable axis, ties toward the smaller value.
    Nearest,
    /// Exactly the query, with `avg_levels` rounded to an integer.
    Exact,
}

/// Observable coordinates of a group of records.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Cell {
    pub num_samples: usize,
    pub num_variables: usize,
    pub avg_levels: u32,
}

impl Cell {
    fn of(config: &SynthesisConfig) -> Self {
        Cell { num_samples: config.num_samples, num_variables: config.num_variables, avg_levels: config.avg_levels }
    }
}

/// The cell used for a query and how far it lies from the query on each axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MatchedCell {
    pub cell: Cell,
    pub samples_distance: usize,
    pub variables_distance: usize,
    pub levels_distance: f64,
}

/// Mean and sample standard deviation (0 for a single value).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub mean: f64,
    pub sd: f64,
    pub n: usize,
}

impl Summary {
    pub fn of(values: &[f64]) -> Option<Self> {
        let n = values.len();
        if n == 0 {
            return None;
        }
        let mean = values.iter().sum::<f64>() / n as f64;
        let sd = if n < 2 {
            0.0
        } else {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
        };
        Some(Summary { mean, sd, n })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricStats {
    pub skeleton_precision: Summary,
    pub skeleton_recall: Summary,
    pub vstructure_precision: Summary,
    pub vstructure_recall: Summary,
    /// Absent when no Ok record has a PCOR value.
    pub pcor: Option<Summary>,
}

/// Pooled results of one learner configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlgorithmStats {
    /// Display name; the algorithm name, suffixed when several configurations share it.
    pub label: String,
    pub config: LearnerConfig,
    pub records: usize,
    pub ok: usize,
    pub timeout: usize,
    pub failed: usize,
    pub pcor_failures: usize,
    /// `None` flags an algorithm without a single Ok record.
    pub metrics: Option<MetricStats>,
}

/// Mean skeleton recall of one algorithm at one sample size.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrendPoint {
    pub num_samples: usize,
    pub skeleton_recall: f64,
}

/// Everything [`aggregate`] derives from a record set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub matched: MatchedCell,
    /// Sorted by label.
    pub algorithms: Vec<AlgorithmStats>,
    /// Distinct synthesis configurations pooled, in ascending seed order.
    pub configs: Vec<SynthesisConfig>,
    pub pcor_configs: Vec<PcorConfig>,
    /// Per algorithm label, skeleton recall along the sample-size axis at the
    /// matched variables and levels; only sample sizes present in the records.
    pub sample_trend: BTreeMap<String, Vec<TrendPoint>>,
}

/// Nearest value of `available` to `x`; ties go to the smaller value.
pub fn nearest(available: &BTreeSet<usize>, x: f64) -> Option<usize> {
    available.iter().copied().min_by(|&a, &b| {
        let (da, db) = ((a as f64 - x).abs(), (b as f64 - x).abs());
        da.total_cmp(&db).then(a.cmp(&b))
    })
}

/// Integer level count used for a real-valued average: nearest integer, ties down, at least 2.
pub fn round_levels(avg_levels: f64) -> u32 {
    let candidates: BTreeSet<usize> = [avg_levels.floor().max(2.0) as usize, avg_levels.ceil().max(2.0) as usize].into();
    nearest(&candidates, avg_levels).expect("two candidates") as u32
}

/// Pools the records at the matched cell over every non-observable value and replicate.
pub fn aggregate(
    records: &[ExperimentRecord],
    observables: &ObservableCharacteristics,
    rule: MatchingRule,
) -> Result<Aggregate, DatasheetError> {
    if records.is_empty() {
        return Err(DatasheetError::NoRecords);
    }
    let cells: BTreeSet<Cell> = records.iter().map(|r| Cell::of(&r.config)).collect();
    let target = match rule {
        MatchingRule::Exact => Cell {
            num_samples: observables.num_samples,
            num_variables: observables.num_variables,
            avg_levels: round_levels(observables.avg_levels),
        },
        MatchingRule::Nearest => {
            let axis = |f: fn(&Cell) -> usize, x: f64| {
                nearest(&cells.iter().map(f).collect(), x).expect("records are nonempty")
            };
            Cell {
                num_samples: axis(|c| c.num_samples, observables.num_samples as f64),
                num_variables: axis(|c| c.num_variables, observables.num_variables as f64),
                avg_levels: axis(|c| c.avg_levels as usize, observables.avg_levels) as u32,
            }
        }
    };
    if !cells.contains(&target) {
        return Err(DatasheetError::NoMatchingRecords { wanted: target, nearest: nearest_cells(&cells, observables) });
    }
    let matched = MatchedCell {
        cell: target,
        samples_distance: target.num_samples.abs_diff(observables.num_samples),
        variables_distance: target.num_variables.abs_diff(observables.num_variables),
        levels_distance: (target.avg_levels as f64 - observables.avg_levels).abs(),
    };

    // a fixed order keeps floating-point sums identical however the records were produced
    let mut selected: Vec<&ExperimentRecord> = records.iter().filter(|r| Cell::of(&r.config) == target).collect();
    selected.sort_by_cached_key(|r| (algorithm_key(&r.algorithm), r.key()));

    let mut by_algorithm: BTreeMap<String, Vec<&ExperimentRecord>> = BTreeMap::new();
    for r in &selected {
        by_algorithm.entry(algorithm_key(&r.algorithm)).or_default().push(r);
    }
    let labels = labels(by_algorithm.values().map(|rs| &rs[0].algorithm));
    let mut algorithms: Vec<AlgorithmStats> = by_algorithm
        .values()
        .zip(&labels)
        .map(|(rs, label)| algorithm_stats(label.clone(), rs))
        .collect();
    algorithms.sort_by(|a, b| a.label.cmp(&b.label));

    let mut configs: Vec<SynthesisConfig> = Vec::new();
    let mut seen = BTreeSet::new();
    for r in &selected {
        if seen.insert(r.config.seed) {
            configs.push(r.config.clone());
        }
    }
    configs.sort_by_key(|c| c.seed);
    let mut pcor_configs: Vec<PcorConfig> = Vec::new();
    for r in &selected {
        if !pcor_configs.contains(&r.pcor_config) {
            pcor_configs.push(r.pcor_config);
        }
    }

    let label_of: BTreeMap<String, String> = by_algorithm.keys().cloned().zip(labels).collect();
    let mut trend_values: BTreeMap<(String, usize), Vec<f64>> = BTreeMap::new();
    let mut along_axis: Vec<&ExperimentRecord> = records
        .iter()
        .filter(|r| r.config.num_variables == target.num_variables && r.config.avg_levels == target.avg_levels)
        .collect();
    along_axis.sort_by_cached_key(|r| r.key());
    for r in along_axis {
        if let (Some(label), Some(m)) = (label_of.get(&algorithm_key(&r.algorithm)), &r.metrics) {
            trend_values.entry((label.clone(), r.config.num_samples)).or_default().push(m.skeleton_recall);
        }
    }
    let mut sample_trend: BTreeMap<String, Vec<TrendPoint>> = BTreeMap::new();
    for ((label, num_samples), values) in trend_values {
        let skeleton_recall = Summary::of(&values).expect("nonempty").mean;
        sample_trend.entry(label).or_default().push(TrendPoint { num_samples, skeleton_recall });
    }

    Ok(Aggregate { matched, algorithms, configs, pcor_configs, sample_trend })
}

fn algorithm_stats(label: String, records: &[&ExperimentRecord]) -> AlgorithmStats {
    let mut stats = AlgorithmStats {
        label,
        config: records[0].algorithm,
        records: records.len(),
        ok: 0,
        timeout: 0,
        failed: 0,
        pcor_failures: 0,
        metrics: None,
    };
    let mut columns: [Vec<f64>; 5] = Default::default();
    for r in records {
        match &r.status {
            RecordStatus::Ok => stats.ok += 1,
            RecordStatus::Timeout => stats.timeout += 1,
            RecordStatus::Failed(_) => stats.failed += 1,
        }
        let Some(m) = (r.status == RecordStatus::Ok).then_some(r.metrics).flatten() else { continue };
        columns[0].push(m.skeleton_precision);
        columns[1].push(m.skeleton_recall);
        columns[2].push(m.vstructure_precision);
        columns[3].push(m.vstructure_recall);
        match r.pcor.as_ref().and_then(|p| p.value()) {
            Some(v) => columns[4].push(v),
            None => stats.pcor_failures += 1,
        }
    }
    if !columns[0].is_empty() {
        let s = |i: usize| Summary::of(&columns[i]).expect("nonempty");
        stats.metrics = Some(MetricStats {
            skeleton_precision: s(0),
            skeleton_recall: s(1),
            vstructure_precision: s(2),
            vstructure_recall: s(3),
            pcor: Summary::of(&columns[4]),
        });
    }
    stats
}

fn algorithm_key(config: &LearnerConfig) -> String {
    serde_json::to_string(config).expect("learner configurations serialize")
}

fn labels<'a>(configs: impl Iterator<Item = &'a LearnerConfig>) -> Vec<String> {
    let names: Vec<&str> = configs.map(|c| c.algorithm.as_str()).collect();
    let mut seen: BTreeMap<&str, usize> = BTreeMap::new();
    names
        .iter()
        .map(|&n| {
            let shared = names.iter().filter(|&&m| m == n).count() > 1;
            let i = seen.entry(n).or_insert(0);
            *i += 1;
            if shared {
                format!("{n}-{i}")
            } else {
                n.to_string()
            }
        })
        .collect()
}

/// Up to five available cells closest to the query, by summed relative distance per axis.
fn nearest_cells(cells: &BTreeSet<Cell>, q: &ObservableCharacteristics) -> Vec<Cell> {
    let rel = |a: f64, b: f64| (a - b).abs() / b.max(1.0);
    let mut ranked: Vec<(f64, Cell)> = cells
        .iter()
        .map(|c| {
            let d = rel(c.num_samples as f64, q.num_samples as f64)
                + rel(c.num_variables as f64, q.num_variables as f64)
                + rel(c.avg_levels as f64, q.avg_levels);
            (d, *c)
        })
        .collect();
    ranked.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    ranked.into_iter().take(5).map(|(_, c)| c).collect()
}
