use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use causal_datasheet::grid::{
    enumerate_grid, load_records, run_experiment, run_grid, GridError, GridSpec, RecordStatus, ResultStore, RunOptions,
};
use causal_datasheet::learn::{Algorithm, LearnerConfig};
use causal_datasheet::metrics::PcorConfig;
use causal_datasheet::synth::StructureType;
use proptest::prelude::*;

fn small_grid() -> GridSpec {
    GridSpec {
        samples: vec![300],
        variables: vec![4, 5],
        alphas: vec![5.0],
        complexities: vec![1],
        structure_types: vec![StructureType::IcDag, StructureType::ForestFire],
        avg_levels: vec![2],
        replicates: 1,
        algorithms: Algorithm::ALL.iter().map(|&a| LearnerConfig::new(a)).collect(),
        global_seed: 11,
        pcor: PcorConfig::default(),
    }
}

fn canonical_set(path: &Path) -> BTreeSet<String> {
    load_records(path).unwrap().iter().map(|r| r.canonical_json()).collect()
}

fn run(spec: &GridSpec, jobs: usize, resume: bool, path: &Path) -> causal_datasheet::grid::GridSummary {
    run_grid(spec, &RunOptions { jobs, resume }, path, |_| {}).unwrap()
}

#[test]
fn two_cell_grid_then_resume_does_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("results.jsonl");
    let spec = GridSpec { structure_types: vec![StructureType::IcDag], ..small_grid() };
    let first = run(&spec, 2, false, &path);
    assert_eq!(first.expected_records, 6);
    assert_eq!(first.new.total(), 6);
    assert_eq!(load_records(&path).unwrap().len(), 6);
    let again = run(&spec, 2, true, &path);
    assert_eq!(again.new.total(), 0);
    assert_eq!(again.existing_records, 6);
    assert_eq!(again.total, first.total);
    assert_eq!(load_records(&path).unwrap().len(), 6);
}

#[test]
fn records_share_config_and_are_reproducible() {
    let spec = small_grid();
    let entry = &enumerate_grid(&spec)[0];
    let a = run_experiment(entry, &spec.algorithms, &spec.pcor);
    let b = run_experiment(entry, &spec.algorithms, &spec.pcor);
    assert_eq!(a.len(), 3);
    for (x, y) in a.iter().zip(&b) {
        assert_eq!(x.config, entry.config);
        assert_eq!(x.replicate, entry.replicate);
        assert_eq!(x.status, RecordStatus::Ok);
        assert!(x.metrics.is_some() && x.pcor.is_some());
        assert_eq!(x.canonical_json(), y.canonical_json());
    }
}

#[test]
fn results_do_not_depend_on_worker_count() {
    let dir = tempfile::tempdir().unwrap();
    let (one, four) = (dir.path().join("one.jsonl"), dir.path().join("four.jsonl"));
    run(&small_grid(), 1, false, &one);
    run(&small_grid(), 4, false, &four);
    assert_eq!(canonical_set(&one), canonical_set(&four));
    assert_eq!(canonical_set(&one).len(), 12);
}

#[test]
fn timeouts_are_recorded_without_metrics() {
    let spec = GridSpec {
        samples: vec![2000],
        variables: vec![12],
        algorithms: vec![LearnerConfig { time_budget_seconds: Some(1e-9), ..LearnerConfig::new(Algorithm::Ges) }],
        ..small_grid()
    };
    let records = run_experiment(&enumerate_grid(&spec)[0], &spec.algorithms, &spec.pcor);
    assert_eq!(records[0].status, RecordStatus::Timeout);
    assert!(records[0].metrics.is_none() && records[0].pcor.is_none());
}

#[test]
fn resume_cuts_an_interrupted_line_and_rejects_corruption() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.jsonl");
    run(&small_grid(), 2, false, &path);
    let full = fs::read_to_string(&path).unwrap();
    let complete = canonical_set(&path);

    let cut = full.len() - 40;
    fs::write(&path, &full[..cut]).unwrap();
    let (store, records) = ResultStore::resume(&path).unwrap();
    assert_eq!(records.len(), 11);
    assert_eq!(store.len(), 11);
    assert!(fs::read_to_string(&path).unwrap().ends_with('\n'));
    drop(store);
    let s = run(&small_grid(), 2, true, &path);
    assert_eq!(s.new.total(), 1);
    assert_eq!(canonical_set(&path), complete);

    let mut lines: Vec<&str> = full.lines().collect();
    lines[3] = "{\"not\": \"a record\"}";
    fs::write(&path, lines.join("\n") + "\n").unwrap();
    assert!(matches!(ResultStore::resume(&path), Err(GridError::CorruptStore { line: 4, .. })));
}

#[test]
fn store_ignores_duplicate_keys() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("d.jsonl");
    let spec = small_grid();
    let records = run_experiment(&enumerate_grid(&spec)[0], &spec.algorithms, &spec.pcor);
    let mut store = ResultStore::create(&path).unwrap();
    assert!(store.append(&records[0]).unwrap());
    assert!(!store.append(&records[0]).unwrap());
    assert_eq!(load_records(&path).unwrap().len(), 1);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn resume_after_any_crash_point_matches_an_uninterrupted_run(frac in 0.0f64..1.0) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("p.jsonl");
        let spec = GridSpec { variables: vec![4], ..small_grid() };
        run(&spec, 2, false, &path);
        let reference = canonical_set(&path);
        let bytes = fs::read(&path).unwrap();
        fs::write(&path, &bytes[..(bytes.len() as f64 * frac) as usize]).unwrap();
        run(&spec, 3, true, &path);
        prop_assert_eq!(canonical_set(&path), reference);
        prop_assert_eq!(load_records(&path).unwrap().len(), 6);
    }
}
