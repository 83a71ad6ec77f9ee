use std::collections::BTreeMap;

use causal_datasheet::graph::{dag_to_cpdag, Dag};
use causal_datasheet::score::{
    bdeu_from_counts, g2_test, local_bdeu, network_bdeu, BdeuScorer, ContingencyCounts, CountRow, ScoreConfig,
};
use causal_datasheet::synth::{forward_sample, parameterize, Dataset};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

#[derive(Deserialize)]
struct OracleCase {
    child_cardinality: usize,
    parent_config_count: u128,
    ess: f64,
    rows: Vec<Vec<u32>>,
    score: String,
}

#[test]
fn bdeu_matches_high_precision_oracle() {
    let cases: Vec<OracleCase> = serde_json::from_str(include_str!("fixtures/bdeu_oracle.json")).unwrap();
    assert_eq!(cases.len(), 100);
    for (i, case) in cases.iter().enumerate() {
        let rows = case
            .rows
            .iter()
            .enumerate()
            .map(|(j, c)| CountRow { config: j as u128, counts: c.clone(), total: c.iter().sum() })
            .collect();
        let counts = ContingencyCounts::from_rows(case.child_cardinality, case.parent_config_count, rows);
        let got: f64 = bdeu_from_counts(&counts, case.ess);
        let expected: f64 = case.score.parse().unwrap();
        let rel = (got - expected).abs() / expected.abs().max(1.0);
        assert!(rel < 1e-9, "case {i}: {got} vs {expected} (rel {rel:e})");
    }
}

fn uniform(cols: usize, n: usize, cards: &[usize], seed: u64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let columns = (0..cols).map(|c| (0..n).map(|_| rng.random_range(0..cards[c]) as u16).collect()).collect();
    Dataset::from_codes((0..cols).map(|i| format!("v{i}")).collect(), columns, cards).unwrap()
}

fn sampled(dag: &Dag, cards: &[usize], alpha: f64, n: usize, seed: u64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bn = parameterize::<f64, _>(dag, cards, alpha, &mut rng);
    forward_sample(&bn, n, &mut rng)
}

#[test]
fn independent_columns_prefer_the_empty_graph() {
    let d = uniform(2, 10_000, &[2, 2], 11);
    let cfg = ScoreConfig::default();
    let empty: f64 = network_bdeu(&d, &Dag::empty(2), &cfg);
    let spurious: f64 = network_bdeu(&d, &Dag::new(2, [(0, 1)]).unwrap(), &cfg);
    assert!(empty > spurious, "{empty} <= {spurious}");
}

#[test]
fn chain_and_fork_score_alike() {
    let truth = Dag::new(3, [(0, 1), (1, 2)]).unwrap();
    let d = sampled(&truth, &[2, 3, 2], 1.0, 5_000, 12);
    let cfg = ScoreConfig::default();
    let chain: f64 = network_bdeu(&d, &truth, &cfg);
    let fork: f64 = network_bdeu(&d, &Dag::new(3, [(1, 0), (1, 2)]).unwrap(), &cfg);
    let collider: f64 = network_bdeu(&d, &Dag::new(3, [(0, 1), (2, 1)]).unwrap(), &cfg);
    assert!((chain - fork).abs() < 1e-9);
    assert!((chain - collider).abs() > 1e-6);
}

/// Every DAG on `n` labelled nodes, by choosing none/forward/backward per pair.
fn all_dags(n: usize) -> Vec<Dag> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
    let mut out = Vec::new();
    let total = 3usize.pow(pairs.len() as u32);
    for mut code in 0..total {
        let mut edges = Vec::new();
        for &(u, v) in &pairs {
            match code % 3 {
                1 => edges.push((u, v)),
                2 => edges.push((v, u)),
                _ => {}
            }
            code /= 3;
        }
        if let Ok(d) = Dag::new(n, edges) {
            out.push(d);
        }
    }
    out
}

#[test]
fn bdeu_is_score_equivalent_on_small_graphs() {
    for (n, expected_dags) in [(3usize, 25usize), (4, 543), (5, 29_281)] {
        let dags = all_dags(n);
        assert_eq!(dags.len(), expected_dags);
        let truth = Dag::new(n, (1..n).map(|v| (v - 1, v))).unwrap();
        let cards: Vec<usize> = (0..n).map(|v| 2 + v % 3).collect();
        let d = sampled(&truth, &cards, 2.0, 1_500, 13 + n as u64);
        for ess in [1.0, 7.5] {
            let scorer = BdeuScorer::new(&d, ScoreConfig { equivalent_sample_size: ess });
            let mut classes: BTreeMap<String, (f64, f64)> = BTreeMap::new();
            for dag in &dags {
                let key = serde_json::to_string(&dag_to_cpdag(dag)).unwrap();
                let s = scorer.network(dag);
                let entry = classes.entry(key).or_insert((s, s));
                entry.0 = entry.0.min(s);
                entry.1 = entry.1.max(s);
            }
            for (class, (lo, hi)) in &classes {
                assert!(hi - lo < 1e-6, "n={n} ess={ess} class {class}: spread {}", hi - lo);
            }
        }
    }
}

/// Classical G² from scratch: scan the data once per (stratum, x, y) cell.
fn naive_g2(d: &Dataset, x: usize, y: usize, z: &[usize]) -> (f64, usize) {
    let strata: usize = z.iter().map(|&v| d.cardinality(v)).product();
    let n = d.num_samples();
    let in_stratum = |row: usize, s: usize| {
        let mut rest = s;
        for &v in z.iter().rev() {
            let r = d.cardinality(v);
            if d.column(v)[row] as usize != rest % r {
                return false;
            }
            rest /= r;
        }
        true
    };
    let (rx, ry) = (d.cardinality(x), d.cardinality(y));
    let mut g = 0.0;
    let mut df = 0;
    for s in 0..strata {
        let mut o = vec![vec![0.0f64; ry]; rx];
        for a in 0..rx {
            for b in 0..ry {
                for row in 0..n {
                    if in_stratum(row, s) && d.column(x)[row] as usize == a && d.column(y)[row] as usize == b {
                        o[a][b] += 1.0;
                    }
                }
            }
        }
        let total: f64 = o.iter().flatten().sum();
        if total == 0.0 {
            continue;
        }
        let row_sums: Vec<f64> = o.iter().map(|r| r.iter().sum()).collect();
        let col_sums: Vec<f64> = (0..ry).map(|b| o.iter().map(|r| r[b]).sum()).collect();
        for a in 0..rx {
            for b in 0..ry {
                if o[a][b] > 0.0 {
                    let e = row_sums[a] * col_sums[b] / total;
                    g += o[a][b] * (o[a][b] / e).ln();
                }
            }
        }
        let live_x = row_sums.iter().filter(|&&s| s > 0.0).count();
        let live_y = col_sums.iter().filter(|&&s| s > 0.0).count();
        df += (live_x - 1) * (live_y - 1);
    }
    (2.0 * g, df)
}

#[test]
fn g2_matches_naive_oracle() {
    let truth = Dag::new(4, [(0, 1), (0, 2), (1, 3), (2, 3)]).unwrap();
    for seed in 0..20u64 {
        let cards = [2 + (seed % 2) as usize, 3, 2, 2 + (seed % 3) as usize];
        let d = sampled(&truth, &cards, 0.7, 800, 100 + seed);
        for (x, y, z) in [(1usize, 2usize, vec![]), (1, 2, vec![0]), (0, 3, vec![1, 2]), (3, 0, vec![2])] {
            let got = g2_test(&d, x, y, &z, 0.05).unwrap();
            let (stat, df) = naive_g2(&d, x, y, &z);
            assert_eq!(got.degrees_of_freedom, df);
            assert!(
                (got.statistic - stat).abs() <= 1e-10 * stat.abs().max(1.0),
                "seed {seed} ({x},{y}|{z:?}): {} vs {stat}",
                got.statistic
            );
        }
    }
}

fn dataset_strategy() -> impl Strategy<Value = Dataset> {
    (prop::collection::vec(2usize..5, 2..6), 0usize..300, any::<u64>())
        .prop_map(|(cards, n, seed)| uniform(cards.len(), n, &cards, seed))
}

proptest! {
    #[test]
    fn counts_are_consistent(d in dataset_strategy(), pick in any::<prop::sample::Index>()) {
        let m = d.num_variables();
        let child = pick.index(m);
        let parents: Vec<usize> = (0..m).filter(|&v| v != child).collect();
        let counts = ContingencyCounts::family(&d, child, &parents);
        prop_assert_eq!(counts.total(), d.num_samples() as u64);
        let q: u128 = parents.iter().map(|&p| d.cardinality(p) as u128).product();
        prop_assert_eq!(counts.parent_config_count(), q);
        let mut last = None;
        for row in counts.rows() {
            prop_assert_eq!(row.total, row.counts.iter().sum::<u32>());
            prop_assert!(row.total > 0);
            prop_assert!(row.config < q);
            prop_assert!(last.is_none_or(|l| l < row.config));
            last = Some(row.config);
        }
    }

    #[test]
    fn network_score_decomposes(d in dataset_strategy(), ess in 0.1f64..20.0) {
        let m = d.num_variables();
        let dag = Dag::new(m, (1..m).map(|v| (v / 2, v))).unwrap();
        let cfg = ScoreConfig { equivalent_sample_size: ess };
        let total: f64 = network_bdeu(&d, &dag, &cfg);
        let parts: f64 = (0..m).map(|v| local_bdeu::<f64>(&d, v, dag.parents(v), &cfg)).sum();
        prop_assert!(total.is_finite());
        prop_assert_eq!(total, parts);
    }

    #[test]
    fn g2_is_symmetric_and_bounded(d in dataset_strategy()) {
        if let (Ok(a), Ok(b)) = (g2_test(&d, 0, 1, &[], 0.05), g2_test(&d, 1, 0, &[], 0.05)) {
            prop_assert!(a.statistic >= 0.0);
            prop_assert!((0.0..=1.0).contains(&a.p_value));
            prop_assert_eq!(a.degrees_of_freedom, b.degrees_of_freedom);
            prop_assert!((a.statistic - b.statistic).abs() <= 1e-9 * a.statistic.max(1.0));
        }
    }
}
