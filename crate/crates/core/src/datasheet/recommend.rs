use std::fmt;

use serde::{Deserialize, Serialize};

use super::{Aggregate, AlgorithmStats, MetricStats, Summary};

/// Skeleton precision counted as high by the orientation check (tool default).
pub const HIGH_SKELETON_PRECISION: f64 = 0.9;
/// Recall counted as low by the orientation and sample-size checks (tool default).
pub const LOW_RECALL: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Rule {
    /// Best PCOR and the threshold check.
    R1,
    /// Best algorithm per metric.
    R2,
    /// Orientation uncertainty.
    R3,
    /// Too few samples.
    R4,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Recommendation {
    pub rule: Rule,
    pub text: String,
}

type Metric = (&'static str, fn(&MetricStats) -> Option<Summary>);

const METRICS: [Metric; 4] = [
    ("skeleton precision", |m| Some(m.skeleton_precision)),
    ("skeleton recall", |m| Some(m.skeleton_recall)),
    ("v-structure precision", |m| Some(m.vstructure_precision)),
    ("v-structure recall", |m| Some(m.vstructure_recall)),
];

/// Highest mean; ties go to the smaller sd, then to the label.
fn best(algorithms: &[AlgorithmStats], metric: fn(&MetricStats) -> Option<Summary>) -> Option<(&str, Summary)> {
    algorithms
        .iter()
        .filter_map(|a| Some((a.label.as_str(), metric(a.metrics.as_ref()?)?)))
        .min_by(|(la, a), (lb, b)| {
            b.mean.total_cmp(&a.mean).then(a.sd.total_cmp(&b.sd)).then_with(|| la.cmp(lb))
        })
}

/// Applies rules R1 to R4 in order.
pub fn recommend(stats: &Aggregate, pcor_threshold: f64) -> Vec<Recommendation> {
    let mut out = Vec::new();
    let mut push = |rule, text: String| out.push(Recommendation { rule, text });

    match best(&stats.algorithms, |m| m.pcor) {
        Some((label, s)) => {
            push(Rule::R1, format!("{label} has the highest expected PCOR ({:.3} ± {:.3}).", s.mean, s.sd));
            if s.mean < pcor_threshold {
                push(
                    Rule::R1,
                    format!(
                        "No algorithm meets the PCOR threshold of {pcor_threshold:.2}; constrain the model or seek expert input."
                    ),
                );
            } else {
                push(Rule::R1, format!("{label} meets the PCOR threshold of {pcor_threshold:.2}."));
            }
        }
        None => push(
            Rule::R1,
            format!(
                "No PCOR measurements are available, so no algorithm is known to meet the PCOR threshold of \
                 {pcor_threshold:.2}; constrain the model or seek expert input."
            ),
        ),
    }

    for (name, metric) in METRICS {
        if let Some((label, s)) = best(&stats.algorithms, metric) {
            push(Rule::R2, format!("Best expected {name}: {label} ({:.3} ± {:.3}).", s.mean, s.sd));
        }
    }

    let best_precision = best(&stats.algorithms, METRICS[0].1);
    let best_recall = best(&stats.algorithms, METRICS[1].1);
    let best_v_recall = best(&stats.algorithms, METRICS[3].1);
    if let (Some((_, p)), Some((_, v))) = (best_precision, best_v_recall) {
        if p.mean >= HIGH_SKELETON_PRECISION && v.mean < LOW_RECALL {
            push(
                Rule::R3,
                format!(
                    "Adjacencies are reliable (best skeleton precision {:.3}) but orientations are not (best \
                     v-structure recall {:.3}); treat learned edge directions as uncertain.",
                    p.mean, v.mean
                ),
            );
        }
    }
    if let Some((label, r)) = best_recall {
        if r.mean < LOW_RECALL {
            let mut text = format!("Expected skeleton recall is low (best {:.3}); collect more samples.", r.mean);
            if let Some(points) = stats.sample_trend.get(label).filter(|p| p.len() > 1) {
                let trend: Vec<String> =
                    points.iter().map(|p| format!("{} samples: {:.3}", p.num_samples, p.skeleton_recall)).collect();
                text += &format!(" Skeleton recall of {label} along the sample-size axis: {}.", trend.join(", "));
            }
            push(Rule::R4, text);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datasheet::{Cell, MatchedCell};
    use crate::learn::{Algorithm, LearnerConfig};

    fn summary(mean: f64, sd: f64) -> Summary {
        Summary { mean, sd, n: 10 }
    }

    fn algo(alg: Algorithm, values: [f64; 5], sd: f64) -> AlgorithmStats {
        AlgorithmStats {
            label: alg.as_str().into(),
            config: LearnerConfig::new(alg),
            records: 10,
            ok: 10,
            timeout: 0,
            failed: 0,
            pcor_failures: 0,
            metrics: Some(MetricStats {
                skeleton_precision: summary(values[0], sd),
                skeleton_recall: summary(values[1], sd),
                vstructure_precision: summary(values[2], sd),
                vstructure_recall: summary(values[3], sd),
                pcor: Some(summary(values[4], sd)),
            }),
        }
    }

    fn stats(algorithms: Vec<AlgorithmStats>) -> Aggregate {
        Aggregate {
            matched: MatchedCell {
                cell: Cell { num_samples: 1000, num_variables: 10, avg_levels: 3 },
                samples_distance: 0,
                variables_distance: 0,
                levels_distance: 0.0,
            },
            algorithms,
            configs: vec![],
            pcor_configs: vec![],
            sample_trend: Default::default(),
        }
    }

    fn texts(recs: &[Recommendation], rule: Rule) -> Vec<&str> {
        recs.iter().filter(|r| r.rule == rule).map(|r| r.text.as_str()).collect()
    }

    #[test]
    fn threshold_not_met() {
        let s = stats(vec![
            algo(Algorithm::Pc, [0.9, 0.8, 0.6, 0.6, 0.7], 0.1),
            algo(Algorithm::Ges, [0.9, 0.8, 0.6, 0.6, 0.75], 0.1),
        ]);
        let recs = recommend(&s, 0.8);
        let r1 = texts(&recs, Rule::R1);
        assert!(r1[0].starts_with("ges has the highest expected PCOR"));
        assert!(r1[1].contains("No algorithm meets the PCOR threshold of 0.80"));
        assert!(recommend(&s, 0.7).iter().all(|r| !r.text.contains("No algorithm meets")));
    }

    #[test]
    fn dominating_algorithm_named_everywhere() {
        let s = stats(vec![
            algo(Algorithm::Pc, [0.5, 0.5, 0.5, 0.5, 0.5], 0.1),
            algo(Algorithm::Mmhc, [0.9, 0.9, 0.9, 0.9, 0.9], 0.1),
            algo(Algorithm::Ges, [0.6, 0.6, 0.6, 0.6, 0.6], 0.1),
        ]);
        let recs = recommend(&s, 0.8);
        let r2 = texts(&recs, Rule::R2);
        assert_eq!(r2.len(), 4);
        assert!(r2.iter().all(|t| t.contains(": mmhc (")));
    }

    #[test]
    fn perfect_metrics_give_no_warnings_and_tie_breaks() {
        let s = stats(vec![
            algo(Algorithm::Pc, [1.0; 5], 0.0),
            algo(Algorithm::Ges, [1.0; 5], 0.0),
            algo(Algorithm::Mmhc, [1.0; 5], 0.0),
        ]);
        let recs = recommend(&s, 0.8);
        assert!(texts(&recs, Rule::R3).is_empty() && texts(&recs, Rule::R4).is_empty());
        assert!(texts(&recs, Rule::R2).iter().all(|t| t.contains(": ges (")));
        // equal means: the smaller sd wins
        let s = stats(vec![algo(Algorithm::Ges, [0.8; 5], 0.2), algo(Algorithm::Pc, [0.8; 5], 0.1)]);
        assert!(texts(&recommend(&s, 0.5), Rule::R2).iter().all(|t| t.contains(": pc (")));
    }

    #[test]
    fn orientation_and_sample_size_warnings() {
        let mut s = stats(vec![algo(Algorithm::Pc, [0.95, 0.3, 0.5, 0.2, 0.6], 0.1)]);
        s.sample_trend.insert(
            "pc".into(),
            vec![
                super::super::TrendPoint { num_samples: 1000, skeleton_recall: 0.3 },
                super::super::TrendPoint { num_samples: 5000, skeleton_recall: 0.45 },
            ],
        );
        let recs = recommend(&s, 0.8);
        assert_eq!(texts(&recs, Rule::R3).len(), 1);
        let r4 = texts(&recs, Rule::R4);
        assert!(r4[0].contains("collect more samples") && r4[0].contains("5000 samples: 0.450"));
        assert_eq!(recs, recommend(&s, 0.8));
    }

    #[test]
    fn no_successful_runs() {
        let mut a = algo(Algorithm::Pc, [1.0; 5], 0.0);
        a.metrics = None;
        let recs = recommend(&stats(vec![a]), 0.8);
        assert_eq!(recs.len(), 1);
        assert!(recs[0].text.contains("No PCOR measurements"));
    }
}
