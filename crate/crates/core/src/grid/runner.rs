use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::mpsc;
use std::thread;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::record::record_key;
use super::{
    enumerate_grid, ExperimentRecord, GridEntry, GridError, GridSpec, PcorOutcome, RecordStatus, ResultStore,
    SCHEMA_VERSION, TOOL_VERSION,
};
use crate::learn::{learn, LearnError, LearnerConfig};
use crate::metrics::{pcor_summary, structural_metrics, PcorConfig};
use crate::synth::{synthesize, SyntheticInstance};

/// Generates the dataset of `entry` once and runs every algorithm on it.
///
/// Failures of one algorithm (errors or panics) become that record's status.
/// The PCOR pair subsample is seeded with `pcor.seed ^ entry.config.seed`.
pub fn run_experiment(entry: &GridEntry, algorithms: &[LearnerConfig], pcor: &PcorConfig) -> Vec<ExperimentRecord> {
    let config = &entry.config;
    let blank = |algorithm: &LearnerConfig, status: RecordStatus| ExperimentRecord {
        schema_version: SCHEMA_VERSION,
        config: config.clone(),
        replicate: entry.replicate,
        algorithm: *algorithm,
        pcor_config: *pcor,
        status,
        metrics: None,
        pcor: None,
        learn_stats: None,
        true_edges: None,
        runtime_seconds: 0.0,
        tool_version: TOOL_VERSION.to_string(),
    };
    let instance: Result<SyntheticInstance<f64>, String> =
        catch_unwind(|| synthesize(config, &mut ChaCha8Rng::seed_from_u64(config.seed)))
            .map_err(panic_message)
            .and_then(|r| r.map_err(|e| e.to_string()));
    let instance = match instance {
        Ok(i) => i,
        Err(reason) => {
            return algorithms
                .iter()
                .map(|a| blank(a, RecordStatus::Failed(format!("synthesis failed: {reason}"))))
                .collect()
        }
    };
    let truth = instance.network.dag();
    let pcor_run = PcorConfig { seed: pcor.seed ^ config.seed, ..*pcor };

    algorithms
        .iter()
        .map(|algorithm| {
            let mut record = blank(algorithm, RecordStatus::Ok);
            record.true_edges = Some(truth.edge_count());
            let start = Instant::now();
            let learned = catch_unwind(AssertUnwindSafe(|| learn(&instance.dataset, algorithm)));
            record.runtime_seconds = start.elapsed().as_secs_f64();
            match learned {
                Ok(Ok(out)) => {
                    record.metrics = Some(structural_metrics(&out.cpdag, truth));
                    record.learn_stats = Some(out.stats);
                    let p = catch_unwind(AssertUnwindSafe(|| {
                        pcor_summary(&instance.network, &out.cpdag, &instance.dataset, &pcor_run)
                    }));
                    record.pcor = Some(match p {
                        Ok(Ok(s)) => PcorOutcome::Measured(s),
                        Ok(Err(e)) => PcorOutcome::Failed(e.to_string()),
                        Err(panic) => PcorOutcome::Failed(panic_message(panic)),
                    });
                }
                Ok(Err(LearnError::Timeout { .. })) => record.status = RecordStatus::Timeout,
                Ok(Err(e)) => record.status = RecordStatus::Failed(e.to_string()),
                Err(panic) => record.status = RecordStatus::Failed(panic_message(panic)),
            }
            record
        })
        .collect()
}

fn panic_message(payload: Box<dyn std::any::Any + Send>) -> String {
    let text = payload
        .downcast_ref::<&str>()
        .map(|s| s.to_string())
        .or_else(|| payload.downcast_ref::<String>().cloned())
        .unwrap_or_else(|| "unknown panic".into());
    format!("panicked: {text}")
}

/// Runs every entry of `spec` with all its algorithms and returns the records
/// in grid order, without touching the file system.
pub fn run_in_memory(spec: &GridSpec, jobs: usize, mut progress: impl FnMut(&GridProgress)) -> Vec<ExperimentRecord> {
    let pending: Vec<(GridEntry, Vec<LearnerConfig>)> =
        enumerate_grid(spec).into_iter().map(|e| (e, spec.algorithms.clone())).collect();
    let mut slots: Vec<Option<Vec<ExperimentRecord>>> = vec![None; pending.len()];
    let mut state = GridProgress { experiments_done: 0, experiments_pending: pending.len(), records_written: 0 };
    progress(&state);
    let index: std::collections::HashMap<String, usize> = pending
        .iter()
        .enumerate()
        .map(|(i, (e, _))| (record_key(&e.config, e.replicate, &spec.algorithms[0]), i))
        .collect();
    execute(&pending, &spec.pcor, jobs, |records| {
        let i = index[&record_key(&records[0].config, records[0].replicate, &spec.algorithms[0])];
        state.records_written += records.len();
        state.experiments_done += 1;
        slots[i] = Some(records);
        progress(&state);
        Ok(())
    })
    .expect("the in-memory sink never fails");
    slots.into_iter().flatten().flatten().collect()
}

/// Worker pool over `pending`; `sink` runs on the calling thread, one
/// experiment at a time, and an error from it stops the pool.
fn execute(
    pending: &[(GridEntry, Vec<LearnerConfig>)],
    pcor: &PcorConfig,
    jobs: usize,
    mut sink: impl FnMut(Vec<ExperimentRecord>) -> Result<(), GridError>,
) -> Result<(), GridError> {
    let jobs = match jobs {
        0 => thread::available_parallelism().map_or(1, |n| n.get()),
        n => n,
    }
    .min(pending.len().max(1));
    let next = AtomicUsize::new(0);
    let stop = AtomicBool::new(false);
    thread::scope(|scope| {
        let (tx, rx) = mpsc::sync_channel::<Vec<ExperimentRecord>>(jobs * 2);
        for _ in 0..jobs {
            let tx = tx.clone();
            let (next, stop) = (&next, &stop);
            scope.spawn(move || loop {
                if stop.load(Ordering::Relaxed) {
                    return;
                }
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some((entry, algorithms)) = pending.get(i) else { return };
                if tx.send(run_experiment(entry, algorithms, pcor)).is_err() {
                    return;
                }
            });
        }
        drop(tx);
        for records in rx {
            if let Err(e) = sink(records) {
                stop.store(true, Ordering::Relaxed);
                return Err(e);
            }
        }
        Ok(())
    })
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StatusCounts {
    pub ok: usize,
    pub timeout: usize,
    pub failed: usize,
}

impl StatusCounts {
    pub fn add(&mut self, status: &RecordStatus) {
        match status {
            RecordStatus::Ok => self.ok += 1,
            RecordStatus::Timeout => self.timeout += 1,
            RecordStatus::Failed(_) => self.failed += 1,
        }
    }

    pub fn total(&self) -> usize {
        self.ok + self.timeout + self.failed
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridSummary {
    /// `|enumerate_grid(spec)| x |algorithms|`
    pub expected_records: usize,
    /// Records of this grid already in the store before the run.
    pub existing_records: usize,
    pub new: StatusCounts,
    /// Every record of this grid in the store after the run.
    pub total: StatusCounts,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridProgress {
    pub experiments_done: usize,
    pub experiments_pending: usize,
    pub records_written: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunOptions {
    /// Worker threads; 0 uses the available parallelism.
    pub jobs: usize,
    /// Keep existing records and run only missing cells; otherwise the file is truncated.
    pub resume: bool,
}

/// Runs every `(entry, algorithm)` cell of `spec` not yet in `results_path`.
///
/// Workers pull entries in grid order; a single writer (the calling thread)
/// appends each record as soon as its experiment finishes. An I/O error stops
/// the run and leaves the records written so far intact.
pub fn run_grid(
    spec: &GridSpec,
    options: &RunOptions,
    results_path: &Path,
    mut progress: impl FnMut(&GridProgress),
) -> Result<GridSummary, GridError> {
    spec.validate()?;
    let (mut store, existing) = if options.resume {
        ResultStore::resume(results_path)?
    } else {
        (ResultStore::create(results_path)?, Vec::new())
    };
    let entries = enumerate_grid(spec);
    let grid_keys: std::collections::HashSet<String> = entries
        .iter()
        .flat_map(|e| spec.algorithms.iter().map(move |a| record_key(&e.config, e.replicate, a)))
        .collect();
    let mut total = StatusCounts::default();
    for r in existing.iter().filter(|r| grid_keys.contains(&r.key())) {
        total.add(&r.status);
    }
    let existing_records = total.total();

    let pending: Vec<(GridEntry, Vec<LearnerConfig>)> = entries
        .into_iter()
        .filter_map(|e| {
            let missing: Vec<LearnerConfig> = spec
                .algorithms
                .iter()
                .filter(|a| !store.contains(&record_key(&e.config, e.replicate, a)))
                .copied()
                .collect();
            (!missing.is_empty()).then_some((e, missing))
        })
        .collect();

    let mut new = StatusCounts::default();
    let mut state = GridProgress { experiments_done: 0, experiments_pending: pending.len(), records_written: 0 };
    progress(&state);
    execute(&pending, &spec.pcor, options.jobs, |records| {
        for r in &records {
            store.append(r)?;
            new.add(&r.status);
            state.records_written += 1;
        }
        state.experiments_done += 1;
        progress(&state);
        Ok(())
    })?;

    total.ok += new.ok;
    total.timeout += new.timeout;
    total.failed += new.failed;
    Ok(GridSummary {
        expected_records: spec.entry_count() as usize * spec.algorithms.len(),
        existing_records,
        new,
        total,
    })
}
