use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};
use thiserror::Error;

use super::ContingencyCounts;
use crate::synth::Dataset;

/// Minimum average number of samples per cell of the stratified table.
pub const MIN_SAMPLES_PER_CELL: f64 = 5.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CiTestError {
    #[error("insufficient data: {samples} samples for {cells} cells")]
    InsufficientData { samples: usize, cells: f64 },
}

/// Outcome of one conditional-independence test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct G2Result {
    pub statistic: f64,
    pub degrees_of_freedom: usize,
    pub p_value: f64,
    pub independent: bool,
}

/// G² likelihood-ratio test of `x ⫫ y | z`.
///
/// Each observed stratum of `z` contributes `(a - 1)(b - 1)` degrees of
/// freedom, where `a` and `b` count the levels of `x` and `y` with a nonzero
/// margin in that stratum. Zero degrees of freedom yield `p = 1`.
pub fn g2_test(data: &Dataset, x: usize, y: usize, z: &[usize], significance: f64) -> Result<G2Result, CiTestError> {
    assert_ne!(x, y, "g2_test needs two distinct variables");
    assert!(!z.contains(&x) && !z.contains(&y), "tested variables may not be conditioned on");
    let rx = data.cardinality(x);
    let ry = data.cardinality(y);
    let cells = (rx * ry) as f64 * z.iter().map(|&v| data.cardinality(v) as f64).product::<f64>();
    let samples = data.num_samples();
    if (samples as f64) < MIN_SAMPLES_PER_CELL * cells {
        return Err(CiTestError::InsufficientData { samples, cells });
    }
    let counts = ContingencyCounts::tabulate(data, &[x, y], z);
    let mut g = 0.0;
    let mut df = 0usize;
    let mut margin_x = vec![0.0; rx];
    let mut margin_y = vec![0.0; ry];
    for row in counts.rows() {
        margin_x.iter_mut().for_each(|m| *m = 0.0);
        margin_y.iter_mut().for_each(|m| *m = 0.0);
        for a in 0..rx {
            for b in 0..ry {
                let o = row.counts[a * ry + b] as f64;
                margin_x[a] += o;
                margin_y[b] += o;
            }
        }
        let n_z = row.total as f64;
        for a in 0..rx {
            for b in 0..ry {
                let o = row.counts[a * ry + b] as f64;
                if o > 0.0 {
                    g += o * (o * n_z / (margin_x[a] * margin_y[b])).ln();
                }
            }
        }
        let live_x = margin_x.iter().filter(|&&m| m > 0.0).count();
        let live_y = margin_y.iter().filter(|&&m| m > 0.0).count();
        df += live_x.saturating_sub(1) * live_y.saturating_sub(1);
    }
    let statistic = (2.0 * g).max(0.0);
    let p_value = if df == 0 {
        1.0
    } else {
        ChiSquared::new(df as f64).expect("positive degrees of freedom").sf(statistic)
    };
    Ok(G2Result { statistic, degrees_of_freedom: df, p_value, independent: p_value > significance })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn uniform(cols: usize, n: usize, card: usize, seed: u64) -> Dataset {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let columns = (0..cols).map(|_| (0..n).map(|_| rng.random_range(0..card) as u16).collect()).collect();
        Dataset::from_codes((0..cols).map(|i| format!("v{i}")).collect(), columns, &vec![card; cols]).unwrap()
    }

    #[test]
    fn identical_columns_are_dependent() {
        let d = uniform(1, 1000, 2, 1);
        let col = d.column(0).to_vec();
        let d = Dataset::from_codes(vec!["a".into(), "b".into()], vec![col.clone(), col], &[2, 2]).unwrap();
        let r = g2_test(&d, 0, 1, &[], 0.05).unwrap();
        assert!(r.p_value < 1e-6);
        assert!(!r.independent);
        assert_eq!(r.degrees_of_freedom, 1);
    }

    #[test]
    fn independent_columns_calibrated() {
        let accepted = (0..100).filter(|&s| g2_test(&uniform(2, 10_000, 2, 100 + s), 0, 1, &[], 0.05).unwrap().independent).count();
        assert!(accepted >= 90, "{accepted}/100");
    }

    #[test]
    fn constant_column_is_independent() {
        let d = uniform(1, 200, 3, 2);
        let d = Dataset::from_codes(vec!["a".into(), "b".into()], vec![d.column(0).to_vec(), vec![1; 200]], &[3, 2])
            .unwrap();
        let r = g2_test(&d, 0, 1, &[], 0.05).unwrap();
        assert_eq!(r.statistic, 0.0);
        assert_eq!(r.degrees_of_freedom, 0);
        assert!(r.independent);
    }

    #[test]
    fn sparse_tables_are_rejected() {
        let d = uniform(4, 100, 3, 3);
        // 3 * 3 * 3 * 3 = 81 cells need 405 samples
        assert!(matches!(g2_test(&d, 0, 1, &[2, 3], 0.05), Err(CiTestError::InsufficientData { samples: 100, .. })));
        assert!(g2_test(&d, 0, 1, &[], 0.05).is_ok());
    }
}
