use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::graph::{skeleton, v_structures, Dag, MixedGraph};

/// Skeleton and v-structure precision/recall of a learned graph.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StructuralMetrics {
    pub skeleton_precision: f64,
    pub skeleton_recall: f64,
    pub vstructure_precision: f64,
    pub vstructure_recall: f64,
}

impl StructuralMetrics {
    pub fn skeleton_f1(&self) -> f64 {
        f1(self.skeleton_precision, self.skeleton_recall)
    }

    pub fn vstructure_f1(&self) -> f64 {
        f1(self.vstructure_precision, self.vstructure_recall)
    }
}

fn f1(p: f64, r: f64) -> f64 {
    if p + r == 0.0 {
        0.0
    } else {
        2.0 * p * r / (p + r)
    }
}

/// `(|L ∩ T| / |L|, |L ∩ T| / |T|)`; an empty `L` has precision 1 and an
/// empty `T` has recall 1.
pub fn precision_recall<E: Ord>(learned: &BTreeSet<E>, truth: &BTreeSet<E>) -> (f64, f64) {
    let hits = learned.intersection(truth).count() as f64;
    let precision = if learned.is_empty() { 1.0 } else { hits / learned.len() as f64 };
    let recall = if truth.is_empty() { 1.0 } else { hits / truth.len() as f64 };
    (precision, recall)
}

pub fn skeleton_pr<G: MixedGraph + ?Sized>(learned: &G, truth: &Dag) -> (f64, f64) {
    assert_eq!(learned.node_count(), truth.node_count(), "graphs must share their node set");
    precision_recall(&skeleton(learned), &skeleton(truth))
}

pub fn vstructure_pr<G: MixedGraph + ?Sized>(learned: &G, truth: &Dag) -> (f64, f64) {
    assert_eq!(learned.node_count(), truth.node_count(), "graphs must share their node set");
    precision_recall(&v_structures(learned), &v_structures(truth))
}

pub fn structural_metrics<G: MixedGraph + ?Sized>(learned: &G, truth: &Dag) -> StructuralMetrics {
    let (skeleton_precision, skeleton_recall) = skeleton_pr(learned, truth);
    let (vstructure_precision, vstructure_recall) = vstructure_pr(learned, truth);
    StructuralMetrics { skeleton_precision, skeleton_recall, vstructure_precision, vstructure_recall }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{dag_to_cpdag, Cpdag};

    #[test]
    fn identical_graphs_score_one() {
        let truth = Dag::new(4, [(0, 2), (1, 2), (2, 3)]).unwrap();
        let m = structural_metrics(&dag_to_cpdag(&truth), &truth);
        assert_eq!(m, StructuralMetrics { skeleton_precision: 1.0, skeleton_recall: 1.0, vstructure_precision: 1.0, vstructure_recall: 1.0 });
        assert_eq!(m.skeleton_f1(), 1.0);
    }

    #[test]
    fn empty_learned_graph() {
        let truth = Dag::new(3, [(0, 1)]).unwrap();
        assert_eq!(skeleton_pr(&Cpdag::new(3, [], []).unwrap(), &truth), (1.0, 0.0));
    }

    #[test]
    fn half_overlap() {
        let truth = Dag::new(3, [(0, 1), (1, 2)]).unwrap();
        let learned = Cpdag::new(3, [], [(0, 1), (0, 2)]).unwrap();
        assert_eq!(skeleton_pr(&learned, &truth), (0.5, 0.5));
    }

    #[test]
    fn spurious_collider_against_chain() {
        let truth = Dag::new(3, [(0, 1), (1, 2)]).unwrap();
        let learned = Cpdag::new(3, [(0, 1), (2, 1)], []).unwrap();
        assert_eq!(vstructure_pr(&learned, &truth), (0.0, 1.0));
    }
}
