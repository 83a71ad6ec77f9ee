use rand::Rng;

use super::{Dataset, DiscreteBayesNet};
use crate::scalar::Real;

/// Ancestral sampling: each row is an independent draw from the joint distribution.
pub fn forward_sample<T: Real, R: Rng + ?Sized>(
    bn: &DiscreteBayesNet<T>,
    num_samples: usize,
    rng: &mut R,
) -> Dataset {
    let n = bn.node_count();
    let order = bn.dag().topological_order();
    let mut columns: Vec<Vec<u16>> = vec![Vec::with_capacity(num_samples); n];
    let mut row = vec![0usize; n];
    for _ in 0..num_samples {
        for &v in &order {
            let cpt = bn.cpt(v);
            let config = cpt.config_index(bn.dag().parents(v).iter().map(|&p| row[p]));
            row[v] = draw_level(cpt.row(config), rng);
            columns[v].push(row[v] as u16);
        }
    }
    Dataset::from_codes(bn.dag().names().to_vec(), columns, bn.cardinalities())
        .expect("sampled codes lie within the cardinalities")
}

/// Inverse-CDF draw; the last level with positive mass absorbs rounding slack.
pub(crate) fn draw_level<T: Real, R: Rng + ?Sized>(probs: &[T], rng: &mut R) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    let mut last_positive = 0;
    for (k, p) in probs.iter().enumerate() {
        let p = p.as_f64();
        if p > 0.0 {
            last_positive = k;
            acc += p;
            if u < acc {
                return k;
            }
        }
    }
    last_positive
}
