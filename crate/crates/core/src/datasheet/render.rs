use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use super::{Datasheet, DatasheetError, DatasheetRequest, Mode, Summary};
use crate::learn::LearnerConfig;
use crate::metrics::{Inference, PcorConfig};

/// A rendered datasheet: Markdown report plus JSON sidecar.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rendered {
    /// `datasheet-<request id>`, the common file stem.
    pub stem: String,
    pub markdown: String,
    pub sidecar: String,
}

impl Rendered {
    /// Writes `<stem>.md` and `<stem>.json` into `dir`.
    pub fn write_to(&self, dir: &Path) -> Result<(PathBuf, PathBuf), DatasheetError> {
        let io = |path: &Path, e: std::io::Error| {
            DatasheetError::Grid(crate::grid::GridError::Io { path: path.to_path_buf(), source: e })
        };
        std::fs::create_dir_all(dir).map_err(|e| io(dir, e))?;
        let md = dir.join(format!("{}.md", self.stem));
        let json = dir.join(format!("{}.json", self.stem));
        std::fs::write(&md, &self.markdown).map_err(|e| io(&md, e))?;
        std::fs::write(&json, &self.sidecar).map_err(|e| io(&json, e))?;
        Ok((md, json))
    }
}

/// First 16 hex digits of the SHA-256 of the request's JSON.
pub fn request_id(request: &DatasheetRequest) -> String {
    let json = serde_json::to_string(request).expect("requests serialize");
    Sha256::digest(json.as_bytes())[..8].iter().map(|b| format!("{b:02x}")).collect()
}

const GLOSSARY: &[(&str, &str)] = &[
    ("Skeleton", "the undirected edge set of a graph, ignoring orientation."),
    ("V-structure", "a triple a -> c <- b with a and b non-adjacent; it fixes edge orientations in the equivalence class."),
    ("Precision / recall", "share of learned items that are true / share of true items that were learned."),
    ("CPDAG", "the graph of a Markov equivalence class: directed where all members agree, undirected otherwise."),
    ("PCOR", "proportion of correct interventional odds ratios: how often the learned model's odds ratio under do(X = a) versus do(X = 0) agrees with the ground truth."),
    ("Observable characteristics", "sample size, number of variables and average number of levels, known for any dataset."),
    ("Non-observable characteristics", "structure type, edges per node and CPT imbalance (alpha) of the unknown true network; the spread shown here comes from sweeping them."),
];

fn cell(s: Option<Summary>) -> String {
    s.map_or_else(|| "n/a".into(), |s| format!("{:.3} ± {:.3}", s.mean, s.sd))
}

fn learner(c: &LearnerConfig) -> String {
    let budget = c.time_budget_seconds.map_or_else(|| "none".into(), |t| format!("{t} s"));
    format!(
        "significance {}, max conditioning set {}, BDeu ESS {}, max parents {}, time budget {budget}",
        c.significance, c.max_conditioning_size, c.score.equivalent_sample_size, c.max_parents
    )
}

fn pcor_settings(c: &PcorConfig) -> String {
    let inference = match c.inference {
        Inference::Exact => "exact".to_string(),
        Inference::MonteCarlo { samples } => format!("Monte Carlo ({samples} samples)"),
    };
    format!(
        "pair budget {}, null-effect epsilon {}, ln OR tolerance {:.4}, inference {inference}, seed {}",
        c.pair_budget, c.direction_epsilon, c.tolerance_log_or, c.seed
    )
}

fn list<T: std::fmt::Display>(items: &[T]) -> String {
    items.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(", ")
}

/// Markdown report and JSON sidecar of `ds`; a pure function of its input.
pub fn render(ds: &Datasheet) -> Rendered {
    let stem = format!("datasheet-{}", request_id(&ds.request));
    let mut md = String::new();
    let obs = &ds.request.observables;
    let m = &ds.matched;
    let _ = writeln!(md, "# Causal Datasheet\n");

    let _ = writeln!(md, "## Characteristics\n");
    let _ = writeln!(md, "| Characteristic | Dataset | Experiments |");
    let _ = writeln!(md, "|---|---|---|");
    let _ = writeln!(md, "| Samples | {} | {} |", obs.num_samples, m.cell.num_samples);
    let _ = writeln!(md, "| Variables | {} | {} |", obs.num_variables, m.cell.num_variables);
    let _ = writeln!(md, "| Average levels | {:.2} | {} |", obs.avg_levels, m.cell.avg_levels);
    let _ = writeln!(md);
    for w in &ds.warnings {
        let _ = writeln!(md, "- Warning: {w}.");
    }
    if !ds.warnings.is_empty() {
        let _ = writeln!(md);
    }

    let _ = writeln!(md, "## Expected Performance\n");
    let _ = writeln!(
        md,
        "Mean ± sample standard deviation over all swept non-observable characteristics and replicates.\n"
    );
    let _ = writeln!(
        md,
        "| Algorithm | Ok runs | Skeleton precision | Skeleton recall | V-structure precision | V-structure recall | PCOR |"
    );
    let _ = writeln!(md, "|---|---|---|---|---|---|---|");
    for a in &ds.algorithms {
        let runs = format!("{}/{}", a.ok, a.records);
        match &a.metrics {
            Some(s) => {
                let _ = writeln!(
                    md,
                    "| {} | {runs} | {} | {} | {} | {} | {} |",
                    a.label,
                    cell(Some(s.skeleton_precision)),
                    cell(Some(s.skeleton_recall)),
                    cell(Some(s.vstructure_precision)),
                    cell(Some(s.vstructure_recall)),
                    cell(s.pcor),
                );
            }
            None => {
                let _ = writeln!(md, "| {} | {runs} | no successful runs | | | | |", a.label);
            }
        }
    }
    let _ = writeln!(md);
    for a in ds.algorithms.iter().filter(|a| a.timeout + a.failed + a.pcor_failures > 0) {
        let _ = writeln!(
            md,
            "- {}: {} timed out, {} failed, {} without a PCOR value.",
            a.label, a.timeout, a.failed, a.pcor_failures
        );
    }
    if ds.algorithms.iter().any(|a| a.timeout + a.failed + a.pcor_failures > 0) {
        let _ = writeln!(md);
    }

    let _ = writeln!(md, "## Recommendations\n");
    for r in &ds.recommendations {
        let _ = writeln!(md, "- [{}] {}", r.rule, r.text);
    }
    let _ = writeln!(md);

    let p = &ds.provenance;
    let _ = writeln!(md, "## Provenance\n");
    let _ = writeln!(md, "- Tool: {}", p.tool_version);
    match &ds.request.mode {
        Mode::Lookup { results_path } => {
            let _ = writeln!(md, "- Mode: lookup in `{}`, nearest grid point per axis", results_path.display());
        }
        Mode::OnDemand(s) => {
            let types: Vec<&str> = s.structure_types.iter().map(|t| t.as_str()).collect();
            let _ = writeln!(
                md,
                "- Mode: on-demand sweep over alpha {{{}}}, complexity {{{}}}, structure {{{}}}, {} replicates, global seed {}",
                list(&s.alphas),
                list(&s.complexities),
                types.join(", "),
                s.replicates,
                s.global_seed
            );
        }
    }
    let _ = writeln!(
        md,
        "- Match distance: samples {}, variables {}, levels {:.2}",
        m.samples_distance, m.variables_distance, m.levels_distance
    );
    let _ = writeln!(
        md,
        "- Pooled: {} records from {} synthetic datasets (configurations and seeds in the sidecar)",
        p.records,
        p.configs.len()
    );
    for a in &ds.algorithms {
        let _ = writeln!(md, "- {}: {}", a.label, learner(&a.config));
    }
    for c in &p.pcor_configs {
        let _ = writeln!(md, "- PCOR: {}", pcor_settings(c));
    }
    let _ = writeln!(
        md,
        "- Thresholds: PCOR {:.2} (requested); skeleton precision {} and recall {} (tool defaults)",
        p.thresholds.pcor, p.thresholds.high_skeleton_precision, p.thresholds.low_recall
    );
    let _ = writeln!(md);

    let _ = writeln!(md, "## Glossary\n");
    for (term, text) in GLOSSARY {
        let _ = writeln!(md, "- **{term}**: {text}");
    }

    let mut sidecar = serde_json::to_string_pretty(ds).expect("datasheets serialize");
    sidecar.push('\n');
    Rendered { stem, markdown: md, sidecar }
}
