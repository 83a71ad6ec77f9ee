use std::collections::BTreeSet;

use causal_datasheet::graph::{cpdag_to_dag, dag_to_cpdag, skeleton, Cpdag, Dag};
use causal_datasheet::learn::{learn, Algorithm, LearnError, LearnerConfig};
use causal_datasheet::synth::{forward_sample, synthesize, Cpt, Dataset, DiscreteBayesNet, StructureType, SynthesisConfig};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn collider_data(n: usize, seed: u64) -> Dataset {
    let dag = Dag::new(3, [(0, 2), (1, 2)]).unwrap();
    let p1 = |q: f64| vec![1.0 - q, q];
    let child: Vec<f64> = [0.1, 0.6, 0.6, 0.95].into_iter().flat_map(p1).collect();
    let bn = DiscreteBayesNet::new(
        dag,
        vec![2, 2, 2],
        vec![Cpt::new(2, vec![], p1(0.5)), Cpt::new(2, vec![], p1(0.4)), Cpt::new(2, vec![2, 2], child)],
    )
    .unwrap();
    forward_sample(&bn, n, &mut ChaCha8Rng::seed_from_u64(seed))
}

fn chain_data(n: usize, seed: u64) -> Dataset {
    let dag = Dag::new(3, [(0, 1), (1, 2)]).unwrap();
    let strong = vec![0.85, 0.15, 0.2, 0.8];
    let bn = DiscreteBayesNet::new(
        dag,
        vec![2, 2, 2],
        vec![Cpt::new(2, vec![], vec![0.5, 0.5]), Cpt::new(2, vec![2], strong.clone()), Cpt::new(2, vec![2], strong)],
    )
    .unwrap();
    forward_sample(&bn, n, &mut ChaCha8Rng::seed_from_u64(seed))
}

fn independent_data(cols: usize, n: usize, seed: u64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let columns = (0..cols).map(|_| (0..n).map(|_| rng.random_range(0..3u16)).collect()).collect();
    Dataset::from_codes((0..cols).map(|i| format!("v{i}")).collect(), columns, &vec![3; cols]).unwrap()
}

#[test]
fn every_learner_recovers_the_collider() {
    let d = collider_data(50_000, 1);
    for alg in Algorithm::ALL {
        let g = learn(&d, &LearnerConfig::new(alg)).unwrap().cpdag;
        assert_eq!(g.directed_edges(), vec![(0, 2), (1, 2)], "{alg}");
        assert!(g.undirected_edges().is_empty(), "{alg}");
    }
}

#[test]
fn ges_returns_the_chain_class() {
    let g = learn(&chain_data(50_000, 2), &LearnerConfig::new(Algorithm::Ges)).unwrap().cpdag;
    assert_eq!(g.undirected_edges(), vec![(0, 1), (1, 2)]);
    assert!(g.directed_edges().is_empty());
}

#[test]
fn independent_columns_give_empty_graphs() {
    let d = independent_data(3, 5_000, 3);
    for alg in Algorithm::ALL {
        assert_eq!(learn(&d, &LearnerConfig::new(alg)).unwrap().cpdag.edge_count(), 0, "{alg}");
    }
}

#[test]
fn tiny_budget_times_out() {
    let d = independent_data(12, 20_000, 4);
    for alg in Algorithm::ALL {
        let cfg = LearnerConfig { time_budget_seconds: Some(1e-6), ..LearnerConfig::new(alg) };
        assert!(matches!(learn(&d, &cfg), Err(LearnError::Timeout { .. })), "{alg}");
    }
}

#[test]
fn single_variable_is_rejected() {
    let d = independent_data(1, 100, 5);
    assert!(matches!(learn(&d, &LearnerConfig::new(Algorithm::Pc)), Err(LearnError::InvalidInput(_))));
}

fn skeleton_f1(learned: &Cpdag, truth: &Dag) -> f64 {
    let l: BTreeSet<(usize, usize)> = skeleton(learned);
    let t = skeleton(truth);
    let hit = l.intersection(&t).count() as f64;
    let p = if l.is_empty() { 1.0 } else { hit / l.len() as f64 };
    let r = if t.is_empty() { 1.0 } else { hit / t.len() as f64 };
    if p + r == 0.0 {
        0.0
    } else {
        2.0 * p * r / (p + r)
    }
}

#[test]
fn large_sample_skeletons_are_accurate() {
    let mut totals = [0.0; 3];
    let seeds = 10u64;
    for seed in 0..seeds {
        let cfg = SynthesisConfig {
            num_samples: 50_000,
            num_variables: 10,
            alpha: 100.0,
            complexity: 1,
            structure_type: StructureType::IcDag,
            avg_levels: 3,
            seed,
        };
        let inst = synthesize::<f64, _>(&cfg, &mut ChaCha8Rng::seed_from_u64(1000 + seed)).unwrap();
        for (i, alg) in Algorithm::ALL.into_iter().enumerate() {
            let g = learn(&inst.dataset, &LearnerConfig::new(alg)).unwrap().cpdag;
            totals[i] += skeleton_f1(&g, inst.network.dag()) / seeds as f64;
        }
    }
    for (alg, f1) in Algorithm::ALL.iter().zip(totals) {
        assert!(f1 >= 0.9, "{alg}: mean skeleton F1 {f1:.3}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn outputs_are_deterministic_completed_pdags(
        seed in any::<u64>(),
        n in 3usize..8,
        samples in 200usize..3000,
        alpha in prop::sample::select(vec![1.0, 10.0, 100.0]),
        structure in prop::sample::select(StructureType::ALL.to_vec()),
    ) {
        let cfg = SynthesisConfig {
            num_samples: samples,
            num_variables: n,
            alpha,
            complexity: 1,
            structure_type: structure,
            avg_levels: 3,
            seed,
        };
        let inst = synthesize::<f64, _>(&cfg, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        for alg in Algorithm::ALL {
            let first = learn(&inst.dataset, &LearnerConfig::new(alg)).unwrap().cpdag;
            let again = learn(&inst.dataset, &LearnerConfig::new(alg)).unwrap().cpdag;
            prop_assert_eq!(&first, &again);
            let ext = cpdag_to_dag(&first).unwrap();
            prop_assert_eq!(dag_to_cpdag(&ext), first);
        }
    }
}
