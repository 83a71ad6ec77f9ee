use rand::Rng;
use rand_distr::{Distribution, Gamma};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Dag, GraphError, GraphJson};
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NetworkError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("expected {expected} cardinalities/CPTs, got {got}")]
    Count { expected: usize, got: usize },
    #[error("node {node}: cardinality must be at least 1")]
    Cardinality { node: usize },
    #[error("node {node}: CPT parents {got:?} do not match graph parents {expected:?}")]
    Parents { node: usize, expected: Vec<usize>, got: Vec<usize> },
    #[error("node {node}: expected {expected} CPT entries, got {got}")]
    TableSize { node: usize, expected: usize, got: usize },
    #[error("node {node}, row {row}: not a probability vector")]
    Row { node: usize, row: usize },
}

/// Conditional probability table of one node.
///
/// Rows are indexed by parent configuration in mixed radix with the first
/// (lowest-index) parent most significant; entries within a row by the
/// node's own level.
#[derive(Debug, Clone, PartialEq)]
pub struct Cpt<T> {
    cardinality: usize,
    parent_cardinalities: Vec<usize>,
    probs: Vec<T>,
}

impl<T: Real> Cpt<T> {
    pub fn new(cardinality: usize, parent_cardinalities: Vec<usize>, probs: Vec<T>) -> Self {
        Cpt { cardinality, parent_cardinalities, probs }
    }

    pub fn cardinality(&self) -> usize {
        self.cardinality
    }

    pub fn parent_cardinalities(&self) -> &[usize] {
        &self.parent_cardinalities
    }

    pub fn row_count(&self) -> usize {
        self.parent_cardinalities.iter().product()
    }

    pub fn row(&self, config: usize) -> &[T] {
        let r = self.cardinality;
        &self.probs[config * r..(config + 1) * r]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[T]> {
        self.probs.chunks(self.cardinality)
    }

    pub fn values(&self) -> &[T] {
        &self.probs
    }

    /// Row index for the given parent levels (same order as the parents).
    pub fn config_index(&self, parent_levels: impl IntoIterator<Item = usize>) -> usize {
        parent_levels
            .into_iter()
            .zip(&self.parent_cardinalities)
            .fold(0, |acc, (level, &card)| acc * card + level)
    }
}

/// DAG with categorical nodes and one CPT per node.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteBayesNet<T> {
    dag: Dag,
    cardinalities: Vec<usize>,
    cpts: Vec<Cpt<T>>,
}

impl<T: Real> DiscreteBayesNet<T> {
    pub fn new(dag: Dag, cardinalities: Vec<usize>, cpts: Vec<Cpt<T>>) -> Result<Self, NetworkError> {
        let n = dag.node_count();
        for got in [cardinalities.len(), cpts.len()] {
            if got != n {
                return Err(NetworkError::Count { expected: n, got });
            }
        }
        let tol = T::normalization_tolerance();
        for v in 0..n {
            if cardinalities[v] == 0 {
                return Err(NetworkError::Cardinality { node: v });
            }
            let cpt = &cpts[v];
            let expected_pc: Vec<usize> = dag.parents(v).iter().map(|&p| cardinalities[p]).collect();
            if cpt.cardinality != cardinalities[v] || cpt.parent_cardinalities != expected_pc {
                return Err(NetworkError::Parents {
                    node: v,
                    expected: expected_pc,
                    got: cpt.parent_cardinalities.clone(),
                });
            }
            let expected = cpt.row_count() * cpt.cardinality;
            if cpt.probs.len() != expected {
                return Err(NetworkError::TableSize { node: v, expected, got: cpt.probs.len() });
            }
            for (row, values) in cpt.rows().enumerate() {
                let sum: T = values.iter().copied().sum();
                if values.iter().any(|p| !(*p >= T::zero())) || (sum - T::one()).abs() > tol {
                    return Err(NetworkError::Row { node: v, row });
                }
            }
        }
        Ok(DiscreteBayesNet { dag, cardinalities, cpts })
    }

    pub fn dag(&self) -> &Dag {
        &self.dag
    }

    pub fn node_count(&self) -> usize {
        self.dag.node_count()
    }

    pub fn cardinalities(&self) -> &[usize] {
        &self.cardinalities
    }

    pub fn cpt(&self, v: usize) -> &Cpt<T> {
        &self.cpts[v]
    }

    /// Graph surgery for `do(var = level)`: incoming edges removed, CPT clamped.
    pub fn intervened(&self, var: usize, level: usize) -> Self {
        let dag = self.dag.without_parents_of(var);
        let mut cpts = self.cpts.clone();
        let r = self.cardinalities[var];
        let mut probs = vec![T::zero(); r];
        probs[level] = T::one();
        cpts[var] = Cpt::new(r, Vec::new(), probs);
        DiscreteBayesNet { dag, cardinalities: self.cardinalities.clone(), cpts }
    }

    /// Same network with entries converted to another scalar type.
    pub fn cast<U: Real>(&self) -> DiscreteBayesNet<U> {
        let cpts = self
            .cpts
            .iter()
            .map(|c| {
                Cpt::new(
                    c.cardinality,
                    c.parent_cardinalities.clone(),
                    c.probs.iter().map(|p| U::of(p.as_f64())).collect(),
                )
            })
            .collect();
        DiscreteBayesNet { dag: self.dag.clone(), cardinalities: self.cardinalities.clone(), cpts }
    }

    pub(crate) fn from_parts_unchecked(dag: Dag, cardinalities: Vec<usize>, cpts: Vec<Cpt<T>>) -> Self {
        DiscreteBayesNet { dag, cardinalities, cpts }
    }
}

/// Symmetric-Dirichlet CPTs: every row is drawn independently with per-component
/// concentration `alpha / r` (total concentration `alpha`).
pub fn parameterize<T: Real, R: Rng + ?Sized>(
    dag: &Dag,
    cardinalities: &[usize],
    alpha: f64,
    rng: &mut R,
) -> DiscreteBayesNet<T> {
    assert_eq!(cardinalities.len(), dag.node_count(), "one cardinality per node");
    let cpts = (0..dag.node_count())
        .map(|v| {
            let r = cardinalities[v];
            let parent_cards: Vec<usize> = dag.parents(v).iter().map(|&p| cardinalities[p]).collect();
            let rows: usize = parent_cards.iter().product();
            let mut probs = Vec::with_capacity(rows * r);
            for _ in 0..rows {
                probs.extend(sample_dirichlet::<T, R>(alpha / r as f64, r, rng));
            }
            Cpt::new(r, parent_cards, probs)
        })
        .collect();
    DiscreteBayesNet::from_parts_unchecked(dag.clone(), cardinalities.to_vec(), cpts)
}

/// Symmetric Dirichlet draw from normalized Gamma variates, computed in log
/// space so that small concentrations do not underflow.
pub fn sample_dirichlet<T: Real, R: Rng + ?Sized>(concentration: f64, k: usize, rng: &mut R) -> Vec<T> {
    assert!(concentration > 0.0 && k > 0);
    let log_draws: Vec<f64> = if concentration >= 1.0 {
        let gamma = Gamma::new(concentration, 1.0).expect("positive shape");
        (0..k).map(|_| gamma.sample(rng).ln()).collect()
    } else {
        // X ~ Gamma(a+1), U ~ U(0,1): X * U^(1/a) ~ Gamma(a)
        let gamma = Gamma::new(concentration + 1.0, 1.0).expect("positive shape");
        (0..k)
            .map(|_| {
                let u: f64 = rng.random::<f64>().max(f64::MIN_POSITIVE);
                gamma.sample(rng).ln() + u.ln() / concentration
            })
            .collect()
    };
    let max = log_draws.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let weights: Vec<f64> = log_draws.iter().map(|l| (l - max).exp()).collect();
    let total: f64 = weights.iter().sum();
    let mut probs: Vec<T> = weights.iter().map(|w| T::of(w / total)).collect();
    let sum: T = probs.iter().copied().sum();
    for p in probs.iter_mut() {
        *p /= sum;
    }
    probs
}

#[derive(Serialize, Deserialize)]
struct CptJson {
    parents: Vec<usize>,
    rows: Vec<Vec<f64>>,
}

/// Graph fields plus `cardinalities` and per-node `cpts`.
#[derive(Serialize, Deserialize)]
struct NetworkJson {
    #[serde(flatten)]
    graph: GraphJson,
    cardinalities: Vec<usize>,
    cpts: Vec<CptJson>,
}

impl<T: Real> Serialize for DiscreteBayesNet<T> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let cpts = (0..self.node_count())
            .map(|v| CptJson {
                parents: self.dag.parents(v).to_vec(),
                rows: self.cpts[v].rows().map(|r| r.iter().map(|p| p.as_f64()).collect()).collect(),
            })
            .collect();
        NetworkJson {
            graph: GraphJson::from(&self.dag),
            cardinalities: self.cardinalities.clone(),
            cpts,
        }
        .serialize(s)
    }
}

impl<'de, T: Real> Deserialize<'de> for DiscreteBayesNet<T> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let j = NetworkJson::deserialize(d)?;
        let dag = Dag::try_from(j.graph).map_err(D::Error::custom)?;
        if j.cpts.len() != dag.node_count() || j.cardinalities.len() != dag.node_count() {
            return Err(D::Error::custom("cardinalities and cpts need one entry per node"));
        }
        let mut cpts = Vec::with_capacity(j.cpts.len());
        for (v, c) in j.cpts.into_iter().enumerate() {
            if c.parents != dag.parents(v) {
                return Err(D::Error::custom(format!("node {v}: CPT parents disagree with the graph")));
            }
            let parent_cards = c.parents.iter().map(|&p| j.cardinalities.get(p).copied().unwrap_or(0)).collect();
            let probs = c.rows.into_iter().flatten().map(T::of).collect();
            cpts.push(Cpt::new(j.cardinalities[v], parent_cards, probs));
        }
        DiscreteBayesNet::new(dag, j.cardinalities, cpts).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use statrs::distribution::{Beta, ContinuousCDF};

    fn ks_statistic(mut xs: Vec<f64>, cdf: impl Fn(f64) -> f64) -> f64 {
        xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let n = xs.len() as f64;
        xs.iter()
            .enumerate()
            .map(|(i, &x)| {
                let f = cdf(x);
                (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
            })
            .fold(0.0, f64::max)
    }

    #[test]
    fn single_node_row_sums_to_one() {
        let dag = Dag::empty(1);
        for alpha in [0.1, 1.0, 10.0, 100.0] {
            let bn: DiscreteBayesNet<f64> = parameterize(&dag, &[3], alpha, &mut ChaCha8Rng::seed_from_u64(4));
            let row = bn.cpt(0).row(0);
            assert_eq!(row.len(), 3);
            assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn alpha_hundred_concentrates_near_half() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let draws: Vec<f64> = (0..1000).map(|_| sample_dirichlet::<f64, _>(50.0, 2, &mut rng)[0]).collect();
        let mad = draws.iter().map(|p| (p - 0.5).abs()).sum::<f64>() / 1000.0;
        assert!(mad < 0.06, "{mad}");
    }

    #[test]
    fn alpha_one_binary_follows_beta_half_half() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let draws: Vec<f64> = (0..1000).map(|_| sample_dirichlet::<f64, _>(0.5, 2, &mut rng)[0]).collect();
        let beta = Beta::new(0.5, 0.5).unwrap();
        let d = ks_statistic(draws, |x| beta.cdf(x));
        // 1.36 / sqrt(1000) is the 5% critical value
        assert!(d < 0.05, "KS = {d}");
    }

    #[test]
    fn tiny_concentrations_stay_normalized() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..200 {
            let row = sample_dirichlet::<f64, _>(1e-3, 6, &mut rng);
            assert!(row.iter().all(|p| *p >= 0.0 && p.is_finite()));
            assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn table_shapes_follow_parents() {
        let dag = Dag::new(3, [(0, 2), (1, 2)]).unwrap();
        let bn: DiscreteBayesNet<f64> = parameterize(&dag, &[2, 3, 4], 1.0, &mut ChaCha8Rng::seed_from_u64(0));
        assert_eq!(bn.cpt(2).row_count(), 6);
        assert_eq!(bn.cpt(2).values().len(), 24);
        assert_eq!(bn.cpt(2).config_index([1, 2]), 5);
        assert!(DiscreteBayesNet::new(dag, vec![2, 3, 4], bn.cpts.clone()).is_ok());
    }

    #[test]
    fn json_round_trip_and_validation() {
        let dag = Dag::new(2, [(0, 1)]).unwrap();
        let bn: DiscreteBayesNet<f64> = parameterize(&dag, &[2, 3], 10.0, &mut ChaCha8Rng::seed_from_u64(2));
        let text = serde_json::to_string(&bn).unwrap();
        assert!(text.starts_with(r#"{"nodes":["X0","X1"],"directed":[[0,1]],"undirected":[],"cardinalities":[2,3]"#));
        let back: DiscreteBayesNet<f64> = serde_json::from_str(&text).unwrap();
        assert_eq!(back, bn);
        let bad = text.replacen("\"rows\":[[", "\"rows\":[[7.0,", 1);
        assert!(serde_json::from_str::<DiscreteBayesNet<f64>>(&bad).is_err());
    }

    #[test]
    fn surgery_clamps_and_cuts() {
        let dag = Dag::new(2, [(0, 1)]).unwrap();
        let bn: DiscreteBayesNet<f32> = parameterize(&dag, &[2, 2], 1.0, &mut ChaCha8Rng::seed_from_u64(3));
        let cut = bn.intervened(1, 1);
        assert!(cut.dag().parents(1).is_empty());
        assert_eq!(cut.cpt(1).row(0), &[0.0, 1.0]);
    }
}
