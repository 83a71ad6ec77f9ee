use std::path::PathBuf;

use causal_datasheet::learn::{Algorithm, LearnerConfig};
use causal_datasheet::metrics::{Inference, PcorConfig};
use causal_datasheet::score::ScoreConfig;
use causal_datasheet::synth::StructureType;
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "causal-datasheet", version, about = "Expected causal structure-learning performance for a dataset")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Write an experiment grid spec (the full characteristic grid unless axes are overridden)
    GenGrid(GenGridArgs),
    /// Run (or resume) every cell of a grid spec into a JSON-Lines results file
    RunGrid(RunGridArgs),
    /// Build a datasheet for a dataset or for explicit characteristics
    Datasheet(DatasheetArgs),
    /// Generate one ground-truth network and sample a dataset from it
    Synth(SynthArgs),
    /// Learn a CPDAG from a categorical CSV file
    Learn(LearnArgs),
    /// Compare a learned graph with a true graph
    Inspect(InspectArgs),
}

#[derive(Args, Clone)]
pub struct LearnerArgs {
    /// BDeu equivalent sample size
    #[arg(long, default_value_t = 1.0)]
    pub ess: f64,
    /// Significance level of the G² independence tests
    #[arg(long, default_value_t = 0.05)]
    pub significance: f64,
    /// Largest conditioning set tried by PC and MMPC
    #[arg(long, default_value_t = 3)]
    pub max_conditioning_size: usize,
    /// Parent-set cap for GES insertions and hill climbing
    #[arg(long, default_value_t = 8)]
    pub max_parents: usize,
    /// Wall-clock budget per learner run in seconds; 0 disables it
    #[arg(long, default_value_t = 3600.0)]
    pub time_budget: f64,
}

impl LearnerArgs {
    pub fn config(&self, algorithm: Algorithm) -> LearnerConfig {
        LearnerConfig {
            algorithm,
            score: ScoreConfig { equivalent_sample_size: self.ess },
            significance: self.significance,
            max_conditioning_size: self.max_conditioning_size,
            max_parents: self.max_parents,
            time_budget_seconds: (self.time_budget > 0.0).then_some(self.time_budget),
        }
    }
}

#[derive(Args, Clone)]
pub struct PcorArgs {
    /// Most (intervention, outcome) pairs evaluated per PCOR computation
    #[arg(long, default_value_t = 50)]
    pub pair_budget: usize,
    /// |ln OR| below this counts as no effect
    #[arg(long, default_value_t = 0.05)]
    pub direction_epsilon: f64,
    /// Largest accepted difference between true and learned ln OR
    #[arg(long, default_value_t = std::f64::consts::LN_2)]
    pub tolerance_log_or: f64,
    /// Use Monte Carlo inference with this many samples instead of exact inference
    #[arg(long)]
    pub mc_samples: Option<usize>,
    /// Seed of the pair subsample and of Monte Carlo inference
    #[arg(long, default_value_t = 0)]
    pub pcor_seed: u64,
}

impl PcorArgs {
    pub fn config(&self) -> PcorConfig {
        PcorConfig {
            pair_budget: self.pair_budget,
            direction_epsilon: self.direction_epsilon,
            tolerance_log_or: self.tolerance_log_or,
            inference: self.mc_samples.map_or(Inference::Exact, |samples| Inference::MonteCarlo { samples }),
            seed: self.pcor_seed,
        }
    }
}

#[derive(Args)]
pub struct GenGridArgs {
    #[arg(long, value_delimiter = ',', default_values_t = [1000usize, 2500, 5000, 10000, 25000, 50000])]
    pub samples: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_values_t = [10usize, 25, 50, 75, 100])]
    pub variables: Vec<usize>,
    /// Dirichlet concentrations of the CPT rows
    #[arg(long, value_delimiter = ',', default_values_t = [1.0, 10.0, 50.0, 100.0])]
    pub alphas: Vec<f64>,
    /// Target edges per node
    #[arg(long, value_delimiter = ',', default_values_t = [1u32, 2, 3])]
    pub complexities: Vec<u32>,
    #[arg(long, value_delimiter = ',', default_values_t = StructureType::ALL)]
    pub structure_types: Vec<StructureType>,
    /// Average numbers of levels per variable
    #[arg(long, value_delimiter = ',', default_values_t = [3u32, 4, 5])]
    pub levels: Vec<u32>,
    #[arg(long, default_value_t = 10)]
    pub replicates: u32,
    #[arg(long, value_delimiter = ',', default_values_t = Algorithm::ALL)]
    pub algorithms: Vec<Algorithm>,
    #[arg(long, default_value_t = 0)]
    pub global_seed: u64,
    #[command(flatten)]
    pub learner: LearnerArgs,
    #[command(flatten)]
    pub pcor: PcorArgs,
    /// Output file; standard output if omitted
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct RunGridArgs {
    /// Grid spec (JSON)
    #[arg(long)]
    pub spec: PathBuf,
    /// Results file (JSON Lines)
    #[arg(long)]
    pub out: PathBuf,
    /// Worker threads; 0 uses every available core
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
    /// Keep existing records and run only the missing cells
    #[arg(long)]
    pub resume: bool,
    /// Replace an existing non-empty results file
    #[arg(long, conflicts_with = "resume")]
    pub overwrite: bool,
    /// Override the grid file's global seed
    #[arg(long)]
    pub global_seed: Option<u64>,
}

#[derive(Args)]
pub struct DatasheetArgs {
    /// Categorical CSV with a header row; its characteristics are measured
    #[arg(long, conflicts_with_all = ["samples", "variables", "levels"])]
    pub data: Option<PathBuf>,
    #[arg(long, requires_all = ["variables", "levels"])]
    pub samples: Option<usize>,
    #[arg(long, requires_all = ["samples", "levels"])]
    pub variables: Option<usize>,
    /// Average number of levels per variable
    #[arg(long, requires_all = ["samples", "variables"])]
    pub levels: Option<f64>,
    /// Precomputed results file to look the characteristics up in
    #[arg(long, conflicts_with = "on_demand", required_unless_present = "on_demand")]
    pub results: Option<PathBuf>,
    /// Run experiments at exactly the given characteristics instead of a lookup
    #[arg(long)]
    pub on_demand: bool,
    #[arg(long, value_delimiter = ',', default_values_t = [1.0, 10.0, 50.0, 100.0])]
    pub alphas: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_values_t = [1u32, 2, 3])]
    pub complexities: Vec<u32>,
    #[arg(long, value_delimiter = ',', default_values_t = StructureType::ALL)]
    pub structure_types: Vec<StructureType>,
    #[arg(long, default_value_t = 3)]
    pub replicates: u32,
    #[arg(long, value_delimiter = ',', default_values_t = Algorithm::ALL)]
    pub algorithms: Vec<Algorithm>,
    #[arg(long, default_value_t = 0)]
    pub global_seed: u64,
    /// Results file that on-demand runs append to and resume from
    #[arg(long)]
    pub store: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
    /// Smallest acceptable mean PCOR
    #[arg(long, default_value_t = 0.8)]
    pub pcor_threshold: f64,
    #[command(flatten)]
    pub learner: LearnerArgs,
    #[command(flatten)]
    pub pcor: PcorArgs,
    /// Directory for the report and its JSON sidecar
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct SynthArgs {
    #[arg(long)]
    pub samples: usize,
    #[arg(long)]
    pub variables: usize,
    #[arg(long, default_value_t = 10.0)]
    pub alpha: f64,
    #[arg(long, default_value_t = 1)]
    pub complexity: u32,
    #[arg(long, default_value_t = StructureType::IcDag)]
    pub structure_type: StructureType,
    #[arg(long, default_value_t = 3)]
    pub levels: u32,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Directory for <name>.csv, <name>.net.json and <name>.sidecar.json
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    #[arg(long, default_value = "synthetic")]
    pub name: String,
}

#[derive(Args)]
pub struct LearnArgs {
    /// Categorical CSV with a header row
    #[arg(long)]
    pub data: PathBuf,
    /// Sidecar fixing level labels and cardinalities
    #[arg(long)]
    pub sidecar: Option<PathBuf>,
    #[arg(long, default_value_t = Algorithm::Ges)]
    pub algorithm: Algorithm,
    #[command(flatten)]
    pub learner: LearnerArgs,
    /// Output file; standard output if omitted
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct InspectArgs {
    /// Learned graph (CPDAG or DAG JSON)
    #[arg(long)]
    pub learned: PathBuf,
    /// True DAG, or a network file written by `synth`
    #[arg(long)]
    pub truth: PathBuf,
    /// Dataset for a PCOR comparison; needs a network file as truth
    #[arg(long)]
    pub data: Option<PathBuf>,
    #[command(flatten)]
    pub pcor: PcorArgs,
}
