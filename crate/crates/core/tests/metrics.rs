use std::collections::BTreeSet;

use causal_datasheet::graph::{cpdag_to_dag, dag_to_cpdag, Cpdag, Dag, MixedGraph};
use causal_datasheet::metrics::{
    exact_interventional_dist, fit_parameters, interventional_dist, interventional_odds_ratio, pcor, pcor_summary,
    skeleton_pr, vstructure_pr, Inference, PcorConfig,
};
use causal_datasheet::synth::{forward_sample, gen_dag, parameterize, Cpt, Dataset, DiscreteBayesNet, StructureType};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_net(n: usize, seed: u64) -> DiscreteBayesNet<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for v in 1..n {
        for u in 0..v {
            if rng.random_bool(0.45) {
                edges.push((u, v));
            }
        }
    }
    let dag = Dag::new(n, edges).unwrap();
    let cards: Vec<usize> = (0..n).map(|_| rng.random_range(2..=4)).collect();
    parameterize(&dag, &cards, 2.0, &mut rng)
}

/// P(target | do(x = level)) by summing the truncated product over every joint assignment.
fn enumerate(bn: &DiscreteBayesNet<f64>, target: usize, x: usize, level: usize) -> Vec<f64> {
    let n = bn.node_count();
    let cards = bn.cardinalities();
    let mut out = vec![0.0; cards[target]];
    let mut a = vec![0usize; n];
    loop {
        if a[x] == level {
            let mut p = 1.0;
            for v in (0..n).filter(|&v| v != x) {
                let cpt = bn.cpt(v);
                p *= cpt.row(cpt.config_index(bn.dag().parents(v).iter().map(|&u| a[u])))[a[v]];
            }
            out[a[target]] += p;
        }
        let mut i = 0;
        loop {
            if i == n {
                return out;
            }
            a[i] += 1;
            if a[i] < cards[i] {
                break;
            }
            a[i] = 0;
            i += 1;
        }
    }
}

#[test]
fn exact_inference_matches_enumeration() {
    for seed in 0..50u64 {
        let n = 2 + (seed % 5) as usize;
        let bn = random_net(n, seed);
        for x in 0..n {
            for t in (0..n).filter(|&t| t != x) {
                for level in 0..bn.cardinalities()[x] {
                    let got = exact_interventional_dist(&bn, t, x, level).unwrap();
                    let want = enumerate(&bn, t, x, level);
                    let dev = got.iter().zip(&want).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
                    assert!(dev < 1e-9, "seed {seed}: do({x}={level}) on {t}: {got:?} vs {want:?}");
                    assert!((got.iter().sum::<f64>() - 1.0).abs() < 1e-9);
                }
            }
        }
    }
}

#[test]
fn monte_carlo_agrees_with_exact() {
    for seed in 0..4u64 {
        let bn = random_net(6, 500 + seed);
        for (t, x) in [(5usize, 0usize), (3, 1), (0, 4)] {
            let exact = exact_interventional_dist(&bn, t, x, 1).unwrap();
            let mc = interventional_dist(&bn, t, x, 1, Inference::MonteCarlo { samples: 1_000_000 }, seed);
            for (a, b) in exact.iter().zip(&mc) {
                assert!((a - b).abs() < 0.005, "seed {seed}: {exact:?} vs {mc:?}");
            }
        }
    }
}

#[test]
fn odds_ratios_match_enumeration() {
    for seed in 0..20u64 {
        let bn = random_net(5, 900 + seed);
        let (x, y) = (0, 4);
        for k in 0..bn.cardinalities()[y] {
            let got = interventional_odds_ratio(&bn, x, 1, 0, y, k, Inference::Exact, 0);
            let pa = enumerate(&bn, y, x, 1)[k].clamp(1e-9, 1.0 - 1e-9);
            let pb = enumerate(&bn, y, x, 0)[k].clamp(1e-9, 1.0 - 1e-9);
            let want = (pa / (1.0 - pa)) / (pb / (1.0 - pb));
            assert!((got - want).abs() <= 1e-6 * want.abs(), "{got} vs {want}");
        }
    }
}

/// Colliders found by scanning every (a, b, c) triple of the raw edge lists.
fn naive_vstructures(g: &dyn MixedGraph) -> BTreeSet<(usize, usize, usize)> {
    let n = g.node_count();
    let mut out = BTreeSet::new();
    for c in 0..n {
        for a in 0..n {
            for b in a + 1..n {
                if a != c && b != c && g.is_directed(a, c) && g.is_directed(b, c) && !g.is_adjacent(a, b) {
                    out.insert((c, a, b));
                }
            }
        }
    }
    out
}

fn naive_pr(l: &BTreeSet<(usize, usize, usize)>, t: &BTreeSet<(usize, usize, usize)>) -> (f64, f64) {
    let hit = l.iter().filter(|e| t.contains(e)).count() as f64;
    (
        if l.is_empty() { 1.0 } else { hit / l.len() as f64 },
        if t.is_empty() { 1.0 } else { hit / t.len() as f64 },
    )
}

fn random_dag(n: usize, p: f64, rng: &mut ChaCha8Rng) -> Dag {
    let mut order: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        order.swap(i, rng.random_range(0..=i));
    }
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.random_bool(p) {
                edges.push((order[i], order[j]));
            }
        }
    }
    Dag::new(n, edges).unwrap()
}

#[test]
fn vstructure_pr_matches_triple_scan() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for _ in 0..300 {
        let truth = random_dag(5, 0.5, &mut rng);
        let learned = dag_to_cpdag(&random_dag(5, 0.5, &mut rng));
        let expected = naive_pr(&naive_vstructures(&learned), &naive_vstructures(&truth));
        assert_eq!(vstructure_pr(&learned, &truth), expected);
    }
}

#[test]
fn fitted_parameters_on_a_single_edge() {
    let data = Dataset::from_codes(
        vec!["a".into(), "b".into()],
        vec![vec![0, 0, 0, 1, 1, 1, 1, 1], vec![0, 0, 1, 1, 1, 1, 1, 0]],
        &[2, 2],
    )
    .unwrap();
    let bn: DiscreteBayesNet<f64> = fit_parameters(&Dag::new(2, [(0, 1)]).unwrap(), &data, 1.0);
    // a: (3 + 0.5, 5 + 0.5) / 9; b | a=0: (2.5, 1.5) / 4; b | a=1: (1.5, 4.5) / 6
    assert_eq!(bn.cpt(0).row(0), &[3.5 / 9.0, 5.5 / 9.0]);
    assert_eq!(bn.cpt(1).row(0), &[2.5 / 4.0, 1.5 / 4.0]);
    assert_eq!(bn.cpt(1).row(1), &[1.5 / 6.0, 4.5 / 6.0]);
}

#[test]
fn pcor_on_a_single_edge_matches_hand_computation() {
    let truth = DiscreteBayesNet::new(
        Dag::new(2, [(0, 1)]).unwrap(),
        vec![2, 2],
        vec![Cpt::new(2, vec![], vec![0.5, 0.5]), Cpt::new(2, vec![2], vec![0.7, 0.3, 0.4, 0.6])],
    )
    .unwrap();
    let data = forward_sample(&truth, 4_000, &mut ChaCha8Rng::seed_from_u64(3));
    // the learned class is the same undirected edge; its extension orients 1 -> 0
    let learned = Cpdag::new(2, [], [(0, 1)]).unwrap();
    let ext = cpdag_to_dag(&learned).unwrap();
    assert!(ext.has_edge(1, 0));
    // pairs: (0,1) causal in truth, (1,0) causal in the extension; 2 outcome levels each
    let logit = |p: f64| (p / (1.0 - p)).ln();
    let true_01 = logit(0.6) - logit(0.3);
    // learned do(0) has no effect on 1, and truth do(1) has no effect on 0
    let fitted: DiscreteBayesNet<f64> = fit_parameters(&ext, &data, 1.0);
    let learned_10 = logit(fitted.cpt(0).row(1)[1]) - logit(fitted.cpt(0).row(0)[1]);
    let cfg = PcorConfig::default();
    let mut correct = 0;
    for (t, l) in [(true_01, 0.0), (-true_01, 0.0), (0.0, learned_10), (0.0, -learned_10)] {
        let agree = (t.abs() < cfg.direction_epsilon && l.abs() < cfg.direction_epsilon)
            || (t * l > 0.0 && (t - l).abs() <= cfg.tolerance_log_or);
        correct += usize::from(agree);
    }
    let s = pcor_summary(&truth, &learned, &data, &cfg).unwrap();
    assert_eq!((s.pairs, s.combinations, s.correct), (2, 4, correct));
    // and the directed truth recovers everything
    let directed = Cpdag::new(2, [(0, 1)], []).unwrap();
    assert_eq!(pcor(&truth, &directed, &data, &cfg).unwrap(), 1.0);
}

fn relabel(d: &Dag, perm: &[usize]) -> Dag {
    Dag::new(d.node_count(), d.edges().into_iter().map(|(u, v)| (perm[u], perm[v]))).unwrap()
}

proptest! {
    #[test]
    fn precision_recall_bounds_and_relabeling(seed in any::<u64>(), perm in Just((0..6).collect::<Vec<usize>>()).prop_shuffle()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let truth = random_dag(6, 0.4, &mut rng);
        let other = random_dag(6, 0.4, &mut rng);
        let learned = dag_to_cpdag(&other);
        let s = skeleton_pr(&learned, &truth);
        let v = vstructure_pr(&learned, &truth);
        for x in [s.0, s.1, v.0, v.1] {
            prop_assert!((0.0..=1.0).contains(&x));
        }
        let (truth_p, learned_p) = (relabel(&truth, &perm), dag_to_cpdag(&relabel(&other, &perm)));
        prop_assert_eq!(skeleton_pr(&learned_p, &truth_p), s);
        prop_assert_eq!(vstructure_pr(&learned_p, &truth_p), v);
    }

    #[test]
    fn pcor_is_a_deterministic_fraction(seed in any::<u64>(), budget in 1usize..30) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let dag = gen_dag(StructureType::IcDag, 5, 1, &mut rng).unwrap();
        let bn = parameterize::<f64, _>(&dag, &[2, 3, 2, 3, 2], 5.0, &mut rng);
        let data = forward_sample(&bn, 500, &mut rng);
        let learned = dag_to_cpdag(&random_dag(5, 0.3, &mut rng));
        let cfg = PcorConfig { pair_budget: budget, seed, ..PcorConfig::default() };
        let a = pcor_summary(&bn, &learned, &data, &cfg).unwrap();
        prop_assert!((0.0..=1.0).contains(&a.value));
        prop_assert!(a.pairs <= budget);
        prop_assert_eq!(a, pcor_summary(&bn, &learned, &data, &cfg).unwrap());
    }

    #[test]
    fn fitted_rows_are_distributions(seed in any::<u64>(), pseudo in 0.0f64..5.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let dag = random_dag(4, 0.5, &mut rng);
        let bn = parameterize::<f64, _>(&dag, &[3, 2, 4, 2], 1.0, &mut rng);
        let data = forward_sample(&bn, 60, &mut rng);
        let fitted: DiscreteBayesNet<f64> = fit_parameters(&dag, &data, pseudo);
        for v in 0..4 {
            for row in fitted.cpt(v).rows() {
                prop_assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-9);
            }
        }
    }
}
