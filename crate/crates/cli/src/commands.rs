use std::fs;
use std::io::Write;
use std::path::Path;
use std::time::{Duration, Instant};

use causal_datasheet::datasheet::{
    build_datasheet, extract_characteristics, render, BuildOptions, DatasheetError, DatasheetRequest, Mode,
    ObservableCharacteristics, OnDemandSweep,
};
use causal_datasheet::graph::{Cpdag, Dag, GraphJson};
use causal_datasheet::grid::{GridError, GridProgress, GridSpec, RunOptions};
use causal_datasheet::learn::{learn as learn_cpdag, LearnStats, LearnerConfig};
use causal_datasheet::metrics::{pcor_summary, structural_metrics};
use causal_datasheet::synth::{synthesize, Dataset, DatasetSidecar, SynthesisConfig};
use causal_datasheet::BayesNet;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::args::{DatasheetArgs, GenGridArgs, InspectArgs, LearnArgs, RunGridArgs, SynthArgs};
use crate::CliError;

type CliResult = Result<(), CliError>;

fn failure(e: impl std::fmt::Display) -> CliError {
    CliError::Failure(e.to_string())
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Failure(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> CliResult {
    fs::write(path, text).map_err(|e| CliError::Failure(format!("{}: {e}", path.display())))
}

fn emit(out: Option<&Path>, text: &str) -> CliResult {
    match out {
        Some(p) => write(p, text),
        None => {
            print!("{text}");
            std::io::stdout().flush().map_err(failure)
        }
    }
}

/// Progress on stderr, at most once per second plus the final state.
fn progress_printer() -> impl FnMut(&GridProgress) {
    let mut last: Option<Instant> = None;
    move |p: &GridProgress| {
        let done = p.experiments_done == p.experiments_pending;
        if done || last.is_none_or(|t| t.elapsed() >= Duration::from_secs(1)) {
            eprintln!("{}/{} experiments, {} records written", p.experiments_done, p.experiments_pending, p.records_written);
            last = Some(Instant::now());
        }
    }
}

pub fn gen_grid(a: GenGridArgs) -> CliResult {
    let spec = GridSpec {
        samples: a.samples,
        variables: a.variables,
        alphas: a.alphas,
        complexities: a.complexities,
        structure_types: a.structure_types,
        avg_levels: a.levels,
        replicates: a.replicates,
        algorithms: a.algorithms.iter().map(|&alg| a.learner.config(alg)).collect(),
        global_seed: a.global_seed,
        pcor: a.pcor.config(),
    };
    spec.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    let mut text = serde_json::to_string_pretty(&spec).map_err(failure)?;
    text.push('\n');
    emit(a.out.as_deref(), &text)?;
    eprintln!(
        "{} datasets x {} algorithms = {} records",
        spec.entry_count(),
        spec.algorithms.len(),
        spec.entry_count() * spec.algorithms.len() as u64
    );
    Ok(())
}

pub fn run_grid(a: RunGridArgs) -> CliResult {
    let mut spec = GridSpec::from_json(&read(&a.spec)?).map_err(|e| match e {
        GridError::SpecParse { .. } | GridError::InvalidSpec(_) => {
            CliError::Usage(format!("{}: {e}", a.spec.display()))
        }
        other => failure(other),
    })?;
    if let Some(seed) = a.global_seed {
        spec.global_seed = seed;
    }
    let occupied = fs::metadata(&a.out).map(|m| m.len() > 0).unwrap_or(false);
    if occupied && !a.resume && !a.overwrite {
        return Err(CliError::Usage(format!(
            "{} already holds results; pass --resume to continue or --overwrite to start over",
            a.out.display()
        )));
    }
    let summary = causal_datasheet::grid::run_grid(
        &spec,
        &RunOptions { jobs: a.jobs, resume: a.resume },
        &a.out,
        progress_printer(),
    )
    .map_err(failure)?;
    let (n, t) = (summary.new, summary.total);
    println!(
        "{} new (ok {}, timeout {}, failed {}); {} existing; {}/{} records in {} (ok {}, timeout {}, failed {})",
        n.total(),
        n.ok,
        n.timeout,
        n.failed,
        summary.existing_records,
        t.total(),
        summary.expected_records,
        a.out.display(),
        t.ok,
        t.timeout,
        t.failed
    );
    if t.failed > 0 {
        return Err(CliError::Failure(format!("{} records have status Failed", t.failed)));
    }
    Ok(())
}

pub fn datasheet(a: DatasheetArgs) -> CliResult {
    let (observables, warnings) = match (&a.data, a.samples, a.variables, a.levels) {
        (Some(path), None, None, None) => extract_characteristics(path).map_err(|e| match e {
            DatasheetError::MalformedCsv(m) => CliError::Usage(format!("{}: {m}", path.display())),
            other => failure(other),
        })?,
        (None, Some(num_samples), Some(num_variables), Some(avg_levels)) => {
            (ObservableCharacteristics { num_samples, num_variables, avg_levels }, Vec::new())
        }
        _ => {
            return Err(CliError::Usage(
                "give either --data or all of --samples, --variables and --levels".into(),
            ))
        }
    };
    for w in &warnings {
        eprintln!("warning: {w}");
    }
    let mode = match a.results {
        Some(results_path) => Mode::Lookup { results_path },
        None => Mode::OnDemand(OnDemandSweep {
            alphas: a.alphas,
            complexities: a.complexities,
            structure_types: a.structure_types,
            replicates: a.replicates,
            algorithms: a.algorithms.iter().map(|&alg| a.learner.config(alg)).collect(),
            global_seed: a.global_seed,
            pcor: a.pcor.config(),
        }),
    };
    let request = DatasheetRequest { observables, pcor_threshold: a.pcor_threshold, mode };
    request.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    eprintln!(
        "characteristics: {} samples, {} variables, {:.2} levels on average",
        observables.num_samples, observables.num_variables, observables.avg_levels
    );
    let options = BuildOptions { jobs: a.jobs, store: a.store };
    let ds = build_datasheet(&request, warnings, &options, progress_printer()).map_err(|e| match e {
        DatasheetError::NoMatchingRecords { .. } => CliError::NoMatch(e.to_string()),
        DatasheetError::InvalidRequest(_) => CliError::Usage(e.to_string()),
        other => failure(other),
    })?;
    let (md, json) = render(&ds).write_to(&a.out).map_err(failure)?;
    for r in &ds.recommendations {
        println!("[{}] {}", r.rule, r.text);
    }
    println!("report: {}", md.display());
    println!("sidecar: {}", json.display());
    Ok(())
}

pub fn synth(a: SynthArgs) -> CliResult {
    let config = SynthesisConfig {
        num_samples: a.samples,
        num_variables: a.variables,
        alpha: a.alpha,
        complexity: a.complexity,
        structure_type: a.structure_type,
        avg_levels: a.levels,
        seed: a.seed,
    };
    config.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    let inst = synthesize::<f64, _>(&config, &mut ChaCha8Rng::seed_from_u64(a.seed)).map_err(failure)?;
    fs::create_dir_all(&a.out).map_err(|e| CliError::Failure(format!("{}: {e}", a.out.display())))?;
    let csv = a.out.join(format!("{}.csv", a.name));
    let net = a.out.join(format!("{}.net.json", a.name));
    let sidecar = a.out.join(format!("{}.sidecar.json", a.name));
    inst.dataset.write_csv_path(&csv).map_err(failure)?;
    write(&net, &(serde_json::to_string_pretty(&inst.network).map_err(failure)? + "\n"))?;
    write(&sidecar, &(serde_json::to_string_pretty(&inst.dataset.sidecar(Some(config))).map_err(failure)? + "\n"))?;
    println!("{} edges; wrote {}, {}, {}", inst.network.dag().edge_count(), csv.display(), net.display(), sidecar.display());
    Ok(())
}

/// A learned CPDAG with the settings that produced it.
#[derive(Serialize, Deserialize)]
struct LearnedGraph {
    #[serde(flatten)]
    graph: GraphJson,
    learner: LearnerConfig,
    stats: LearnStats,
}

fn load_dataset(path: &Path, sidecar: Option<&Path>) -> Result<Dataset, CliError> {
    let sidecar: Option<DatasetSidecar> = match sidecar {
        Some(p) => Some(serde_json::from_str(&read(p)?).map_err(|e| CliError::Usage(format!("{}: {e}", p.display())))?),
        None => None,
    };
    Dataset::read_csv_path(path, sidecar.as_ref()).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

pub fn learn(a: LearnArgs) -> CliResult {
    let data = load_dataset(&a.data, a.sidecar.as_deref())?;
    let config = a.learner.config(a.algorithm);
    config.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    let out = learn_cpdag(&data, &config).map_err(failure)?;
    let file = LearnedGraph { graph: GraphJson::from(&out.cpdag), learner: config, stats: out.stats };
    emit(a.out.as_deref(), &(serde_json::to_string_pretty(&file).map_err(failure)? + "\n"))
}

enum Truth {
    Graph(Dag),
    Network(BayesNet),
}

impl Truth {
    fn dag(&self) -> &Dag {
        match self {
            Truth::Graph(d) => d,
            Truth::Network(n) => n.dag(),
        }
    }
}

fn parse_json<T: serde::de::DeserializeOwned>(path: &Path, text: &str) -> Result<T, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

pub fn inspect(a: InspectArgs) -> CliResult {
    let truth_text = read(&a.truth)?;
    let value: serde_json::Value = parse_json(&a.truth, &truth_text)?;
    let truth = if value.get("cpts").is_some() {
        Truth::Network(parse_json(&a.truth, &truth_text)?)
    } else {
        Truth::Graph(parse_json(&a.truth, &truth_text)?)
    };
    let learned: GraphJson = parse_json(&a.learned, &read(&a.learned)?)?;
    let learned = align(learned, truth.dag().names()).map_err(CliError::Usage)?;
    let learned = Cpdag::try_from(learned).map_err(|e| CliError::Usage(format!("{}: {e}", a.learned.display())))?;

    let m = structural_metrics(&learned, truth.dag());
    println!("skeleton precision     {:.4}", m.skeleton_precision);
    println!("skeleton recall        {:.4}", m.skeleton_recall);
    println!("skeleton F1            {:.4}", m.skeleton_f1());
    println!("v-structure precision  {:.4}", m.vstructure_precision);
    println!("v-structure recall     {:.4}", m.vstructure_recall);
    println!("v-structure F1         {:.4}", m.vstructure_f1());
    if let Some(data_path) = &a.data {
        let Truth::Network(net) = &truth else {
            return Err(CliError::Usage("--data needs a network file (with cpts) as --truth".into()));
        };
        let sidecar = DatasetSidecar {
            variables: net.dag().names().to_vec(),
            cardinalities: net.cardinalities().to_vec(),
            level_labels: net.cardinalities().iter().map(|&r| (0..r).map(|k| k.to_string()).collect()).collect(),
            num_samples: 0,
            config: None,
        };
        let data = Dataset::read_csv_path(data_path, Some(&sidecar))
            .map_err(|e| CliError::Usage(format!("{}: {e}", data_path.display())))?;
        let config = a.pcor.config();
        let s = pcor_summary(net, &learned, &data, &config).map_err(failure)?;
        println!("pcor                   {:.4} ({} of {} combinations, {} pairs)", s.value, s.correct, s.combinations, s.pairs);
        println!("pcor settings          {}", serde_json::to_string(&config).map_err(failure)?);
    }
    Ok(())
}

/// Reorders `g`'s nodes to follow `names`.
fn align(g: GraphJson, names: &[String]) -> Result<GraphJson, String> {
    if g.nodes == names {
        return Ok(g);
    }
    let position = |n: &String| names.iter().position(|m| m == n);
    let map: Vec<usize> = g
        .nodes
        .iter()
        .map(|n| position(n).ok_or_else(|| format!("learned node `{n}` is not in the true graph")))
        .collect::<Result<_, _>>()?;
    if g.nodes.len() != names.len() {
        return Err("learned and true graphs have different node sets".into());
    }
    let remap = |edges: Vec<[usize; 2]>| edges.into_iter().map(|[u, v]| [map[u], map[v]]).collect();
    Ok(GraphJson { nodes: names.to_vec(), directed: remap(g.directed), undirected: remap(g.undirected) })
}
