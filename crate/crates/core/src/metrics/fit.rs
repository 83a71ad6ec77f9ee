use crate::graph::Dag;
use crate::scalar::Real;
use crate::score::ContingencyCounts;
use crate::synth::{Cpt, Dataset, DiscreteBayesNet};

/// Posterior-mean CPTs under a symmetric Dirichlet prior with total pseudo-count `pseudo_count`:
/// `(N_jk + pseudo_count / r) / (N_j + pseudo_count)`. Unobserved configurations get uniform rows.
pub fn fit_parameters<T: Real>(dag: &Dag, data: &Dataset, pseudo_count: f64) -> DiscreteBayesNet<T> {
    assert_eq!(dag.node_count(), data.num_variables(), "graph and data disagree on variable count");
    assert!(pseudo_count >= 0.0, "pseudo-count must be non-negative");
    let cards = data.cardinalities();
    let cpts = (0..dag.node_count())
        .map(|v| {
            let r = cards[v];
            let parent_cards: Vec<usize> = dag.parents(v).iter().map(|&p| cards[p]).collect();
            let q: usize = parent_cards.iter().product();
            let uniform = T::one() / T::of_usize(r);
            let mut probs = vec![uniform; q * r];
            let counts = ContingencyCounts::family(data, v, dag.parents(v));
            let prior = pseudo_count / r as f64;
            for row in counts.rows() {
                let j = row.config as usize;
                let denom = row.total as f64 + pseudo_count;
                for (k, &n) in row.counts.iter().enumerate() {
                    probs[j * r + k] = T::of((n as f64 + prior) / denom);
                }
            }
            Cpt::new(r, parent_cards, probs)
        })
        .collect();
    DiscreteBayesNet::new(dag.clone(), cards, cpts).expect("fitted rows are normalized")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn data() -> Dataset {
        // parent 0 then child 1: under parent level 0 the child is (0,0,0,1); level 1 never occurs
        Dataset::from_codes(vec!["p".into(), "c".into()], vec![vec![0, 0, 0, 0], vec![0, 0, 0, 1]], &[2, 2]).unwrap()
    }

    #[test]
    fn smoothed_counts() {
        let bn: DiscreteBayesNet<f64> = fit_parameters(&Dag::new(2, [(0, 1)]).unwrap(), &data(), 1.0);
        let row = bn.cpt(1).row(0);
        assert!((row[0] - 0.7).abs() < 1e-15 && (row[1] - 0.3).abs() < 1e-15);
        assert_eq!(bn.cpt(1).row(1), &[0.5, 0.5]);
    }

    #[test]
    fn zero_pseudo_count_is_maximum_likelihood() {
        let bn: DiscreteBayesNet<f64> = fit_parameters(&Dag::new(2, [(0, 1)]).unwrap(), &data(), 0.0);
        assert_eq!(bn.cpt(1).row(0), &[0.75, 0.25]);
        assert_eq!(bn.cpt(0).row(0), &[1.0, 0.0]);
    }
}
