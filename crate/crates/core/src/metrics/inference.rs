use std::collections::BTreeSet;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Real;
use crate::synth::DiscreteBayesNet;

/// Largest elimination width (neighbours of the eliminated variable) handled exactly.
pub const MAX_ELIMINATION_WIDTH: usize = 20;
/// Largest intermediate table handled exactly.
pub const MAX_FACTOR_CELLS: usize = 1 << 24;
/// Sample count used when exact inference is abandoned.
pub const FALLBACK_SAMPLES: usize = 200_000;

/// How interventional distributions are computed.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Inference {
    /// Variable elimination, falling back to sampling when the elimination is too wide.
    #[default]
    Exact,
    /// Ancestral sampling of the mutilated network.
    MonteCarlo { samples: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InferenceError {
    #[error("elimination too wide: width {width}, {cells} cells")]
    TooWide { width: usize, cells: u128 },
}

/// Table over `vars` in row-major order (last variable varies fastest).
#[derive(Debug, Clone)]
struct Factor<T> {
    vars: Vec<usize>,
    values: Vec<T>,
}

fn strides(vars: &[usize], cards: &[usize]) -> Vec<usize> {
    let mut s = vec![1; vars.len()];
    for i in (0..vars.len().saturating_sub(1)).rev() {
        s[i] = s[i + 1] * cards[vars[i + 1]];
    }
    s
}

impl<T: Real> Factor<T> {
    fn from_cpt(bn: &DiscreteBayesNet<T>, v: usize) -> Self {
        let mut vars = bn.dag().parents(v).to_vec();
        vars.push(v);
        Factor { vars, values: bn.cpt(v).values().to_vec() }
    }

    /// Slice at `var = level`, dropping `var`.
    fn restrict(&self, var: usize, level: usize, cards: &[usize]) -> Self {
        let Some(pos) = self.vars.iter().position(|&v| v == var) else { return self.clone() };
        let old = strides(&self.vars, cards);
        let vars: Vec<usize> = self.vars.iter().copied().filter(|&v| v != var).collect();
        let size: usize = vars.iter().map(|&v| cards[v]).product();
        let new = strides(&vars, cards);
        let values = (0..size)
            .map(|i| {
                let mut index = level * old[pos];
                for (j, &v) in vars.iter().enumerate() {
                    let digit = (i / new[j]) % cards[v];
                    let k = if j < pos { j } else { j + 1 };
                    index += digit * old[k];
                }
                self.values[index]
            })
            .collect();
        Factor { vars, values }
    }
}

/// Multiplies `factors` and sums out `var`.
fn product_sum_out<T: Real>(factors: &[Factor<T>], var: usize, cards: &[usize]) -> Factor<T> {
    let scope: Vec<usize> = factors
        .iter()
        .flat_map(|f| f.vars.iter().copied())
        .filter(|&v| v != var)
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let factor_strides: Vec<Vec<usize>> = factors.iter().map(|f| strides(&f.vars, cards)).collect();
    let stride_in = |fi: usize, v: usize| {
        factors[fi].vars.iter().position(|&u| u == v).map_or(0, |p| factor_strides[fi][p])
    };
    let along: Vec<Vec<usize>> = (0..factors.len()).map(|fi| scope.iter().map(|&v| stride_in(fi, v)).collect()).collect();
    let over: Vec<usize> = (0..factors.len()).map(|fi| stride_in(fi, var)).collect();
    let size: usize = scope.iter().map(|&v| cards[v]).product();
    let mut index = vec![0usize; factors.len()];
    let mut digits = vec![0usize; scope.len()];
    let mut values = Vec::with_capacity(size);
    for _ in 0..size {
        let mut acc = T::zero();
        for k in 0..cards[var] {
            let mut prod = T::one();
            for (fi, f) in factors.iter().enumerate() {
                prod *= f.values[index[fi] + k * over[fi]];
            }
            acc += prod;
        }
        values.push(acc);
        for p in (0..scope.len()).rev() {
            digits[p] += 1;
            for fi in 0..factors.len() {
                index[fi] += along[fi][p];
            }
            if digits[p] < cards[scope[p]] {
                break;
            }
            for fi in 0..factors.len() {
                index[fi] -= along[fi][p] * cards[scope[p]];
            }
            digits[p] = 0;
        }
    }
    Factor { vars: scope, values }
}

/// Greedy min-degree elimination order over every variable except `keep`.
fn min_degree_order<T>(factors: &[Factor<T>], keep: usize, cards: &[usize]) -> Result<Vec<usize>, InferenceError> {
    let vars: BTreeSet<usize> = factors.iter().flat_map(|f| f.vars.iter().copied()).collect();
    let n = cards.len();
    let mut nbrs: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
    for f in factors {
        for &a in &f.vars {
            for &b in &f.vars {
                if a != b {
                    nbrs[a].insert(b);
                }
            }
        }
    }
    let mut remaining: BTreeSet<usize> = vars.into_iter().filter(|&v| v != keep).collect();
    let mut order = Vec::with_capacity(remaining.len());
    while let Some(&v) = remaining.iter().min_by_key(|&&v| (nbrs[v].len(), v)) {
        let width = nbrs[v].len();
        let cells = nbrs[v].iter().fold(cards[v] as u128, |acc, &u| acc.saturating_mul(cards[u] as u128));
        if width > MAX_ELIMINATION_WIDTH || cells > MAX_FACTOR_CELLS as u128 {
            return Err(InferenceError::TooWide { width, cells });
        }
        let around: Vec<usize> = nbrs[v].iter().copied().collect();
        for &a in &around {
            nbrs[a].remove(&v);
            for &b in &around {
                if a != b {
                    nbrs[a].insert(b);
                }
            }
        }
        remaining.remove(&v);
        order.push(v);
    }
    Ok(order)
}

fn normalize<T: Real>(mut p: Vec<T>) -> Vec<T> {
    let total: T = p.iter().copied().sum();
    if total > T::zero() {
        p.iter_mut().for_each(|x| *x /= total);
    }
    p
}

/// `P(target | do(do_var = do_level))` by variable elimination on the
/// ancestors of `target` in the mutilated network.
pub fn exact_interventional_dist<T: Real>(
    bn: &DiscreteBayesNet<T>,
    target: usize,
    do_var: usize,
    do_level: usize,
) -> Result<Vec<T>, InferenceError> {
    assert_ne!(target, do_var, "the outcome cannot be the intervened variable");
    let cards = bn.cardinalities();
    // ancestors of `target` once the edges into `do_var` are cut, `do_var` itself excluded
    let mut relevant = vec![false; bn.node_count()];
    let mut stack = vec![target];
    relevant[target] = true;
    while let Some(v) = stack.pop() {
        for &p in bn.dag().parents(v) {
            if p != do_var && !relevant[p] {
                relevant[p] = true;
                stack.push(p);
            }
        }
    }
    let factors: Vec<Factor<T>> = (0..bn.node_count())
        .filter(|&v| relevant[v])
        .map(|v| Factor::from_cpt(bn, v).restrict(do_var, do_level, cards))
        .collect();
    eliminate_all_but(factors, target, cards)
}

fn eliminate_all_but<T: Real>(factors: Vec<Factor<T>>, keep: usize, cards: &[usize]) -> Result<Vec<T>, InferenceError> {
    let order = min_degree_order(&factors, keep, cards)?;
    let mut pool = factors;
    for v in order {
        let (with, without): (Vec<_>, Vec<_>) = pool.into_iter().partition(|f| f.vars.contains(&v));
        pool = without;
        if !with.is_empty() {
            pool.push(product_sum_out(&with, v, cards));
        }
    }
    let mut out = vec![T::one(); cards[keep]];
    for f in pool.iter().filter(|f| !f.vars.is_empty()) {
        for (o, &x) in out.iter_mut().zip(&f.values) {
            *o *= x;
        }
    }
    Ok(normalize(out))
}

/// Stream seed for one intervention so results do not depend on evaluation order.
fn intervention_seed(seed: u64, do_var: usize, do_level: usize) -> u64 {
    let mut z = seed ^ (do_var as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ (do_level as u64).rotate_left(32);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Empirical distributions of `targets` under `do(do_var = do_level)` from
/// `samples` ancestral draws of the mutilated network.
pub fn monte_carlo_interventional_dists<T: Real>(
    bn: &DiscreteBayesNet<T>,
    targets: &[usize],
    do_var: usize,
    do_level: usize,
    samples: usize,
    seed: u64,
) -> Vec<Vec<T>> {
    assert!(samples > 0, "Monte Carlo needs at least one sample");
    let mutilated = bn.intervened(do_var, do_level);
    let n = bn.node_count();
    let mut needed = vec![false; n];
    for &t in targets {
        needed[t] = true;
        for (v, a) in mutilated.dag().ancestors(t).into_iter().enumerate() {
            needed[v] |= a;
        }
    }
    let order: Vec<usize> = mutilated.dag().topological_order().into_iter().filter(|&v| needed[v]).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(intervention_seed(seed, do_var, do_level));
    let mut counts: Vec<Vec<usize>> = targets.iter().map(|&t| vec![0; bn.cardinalities()[t]]).collect();
    let mut row = vec![0usize; n];
    for _ in 0..samples {
        for &v in &order {
            let cpt = mutilated.cpt(v);
            let config = cpt.config_index(mutilated.dag().parents(v).iter().map(|&p| row[p]));
            row[v] = crate::synth::draw_level(cpt.row(config), &mut rng);
        }
        for (c, &t) in counts.iter_mut().zip(targets) {
            c[row[t]] += 1;
        }
    }
    counts
        .into_iter()
        .map(|c| c.into_iter().map(|k| T::of(k as f64 / samples as f64)).collect())
        .collect()
}

/// Distributions of every variable in `targets` under `do(do_var = do_level)`.
/// Exact mode falls back to [`FALLBACK_SAMPLES`] draws when an elimination is too wide.
pub fn interventional_dists<T: Real>(
    bn: &DiscreteBayesNet<T>,
    targets: &[usize],
    do_var: usize,
    do_level: usize,
    inference: Inference,
    seed: u64,
) -> Vec<Vec<T>> {
    match inference {
        Inference::MonteCarlo { samples } => {
            monte_carlo_interventional_dists(bn, targets, do_var, do_level, samples, seed)
        }
        Inference::Exact => {
            let exact: Result<Vec<Vec<T>>, _> =
                targets.iter().map(|&t| exact_interventional_dist(bn, t, do_var, do_level)).collect();
            exact.unwrap_or_else(|_| {
                monte_carlo_interventional_dists(bn, targets, do_var, do_level, FALLBACK_SAMPLES, seed)
            })
        }
    }
}

/// `P(target | do(do_var = do_level))`.
pub fn interventional_dist<T: Real>(
    bn: &DiscreteBayesNet<T>,
    target: usize,
    do_var: usize,
    do_level: usize,
    inference: Inference,
    seed: u64,
) -> Vec<T> {
    interventional_dists(bn, &[target], do_var, do_level, inference, seed).swap_remove(0)
}

/// Smallest and largest probability used when forming odds.
pub const ODDS_CLAMP: f64 = 1e-9;

/// Log odds of a probability clamped to `[ODDS_CLAMP, 1 - ODDS_CLAMP]`.
pub fn clamped_logit(p: f64) -> f64 {
    let p = p.clamp(ODDS_CLAMP, 1.0 - ODDS_CLAMP);
    (p / (1.0 - p)).ln()
}

/// Odds of `outcome = outcome_level` under `do(do_var = level_a)` divided by the odds under `level_b`.
#[allow(clippy::too_many_arguments)]
pub fn interventional_odds_ratio<T: Real>(
    bn: &DiscreteBayesNet<T>,
    do_var: usize,
    level_a: usize,
    level_b: usize,
    outcome: usize,
    outcome_level: usize,
    inference: Inference,
    seed: u64,
) -> f64 {
    let pa = interventional_dist(bn, outcome, do_var, level_a, inference, seed)[outcome_level].as_f64();
    let pb = interventional_dist(bn, outcome, do_var, level_b, inference, seed)[outcome_level].as_f64();
    (clamped_logit(pa) - clamped_logit(pb)).exp()
}
