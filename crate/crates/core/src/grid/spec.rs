use std::collections::BTreeSet;

use serde::{Deserialize, Deserializer, Serialize};
use sha2::{Digest, Sha256};

use super::GridError;
use crate::learn::{Algorithm, LearnerConfig};
use crate::metrics::PcorConfig;
use crate::synth::{StructureType, SynthesisConfig};

/// Axes of an experiment grid plus the learners run at every point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub samples: Vec<usize>,
    pub variables: Vec<usize>,
    pub alphas: Vec<f64>,
    pub complexities: Vec<u32>,
    pub structure_types: Vec<StructureType>,
    pub avg_levels: Vec<u32>,
    pub replicates: u32,
    /// Each entry is either an algorithm name or a full learner configuration.
    #[serde(deserialize_with = "learner_list")]
    pub algorithms: Vec<LearnerConfig>,
    pub global_seed: u64,
    #[serde(default)]
    pub pcor: PcorConfig,
}

fn learner_list<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<LearnerConfig>, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Entry {
        Name(Algorithm),
        Full(LearnerConfig),
    }
    let entries = Vec::<Entry>::deserialize(d)?;
    Ok(entries
        .into_iter()
        .map(|e| match e {
            Entry::Name(a) => LearnerConfig::new(a),
            Entry::Full(c) => c,
        })
        .collect())
}

/// One synthetic dataset of a grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridEntry {
    pub config: SynthesisConfig,
    pub replicate: u32,
}

impl GridSpec {
    /// The full characteristic grid: 6 sample sizes, 5 variable counts, 4
    /// concentrations, 3 complexities, 3 structure types, 3 level settings and
    /// 10 replicates, run with PC, GES and MMHC.
    pub fn full_grid(global_seed: u64) -> Self {
        GridSpec {
            samples: vec![1_000, 2_500, 5_000, 10_000, 25_000, 50_000],
            variables: vec![10, 25, 50, 75, 100],
            alphas: vec![1.0, 10.0, 50.0, 100.0],
            complexities: vec![1, 2, 3],
            structure_types: StructureType::ALL.to_vec(),
            avg_levels: vec![3, 4, 5],
            replicates: 10,
            algorithms: Algorithm::ALL.iter().map(|&a| LearnerConfig::new(a)).collect(),
            global_seed,
            pcor: PcorConfig::default(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self, GridError> {
        let spec: GridSpec = serde_json::from_str(text).map_err(|e| GridError::SpecParse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), GridError> {
        let bad = |m: String| Err(GridError::InvalidSpec(m));
        macro_rules! axis {
            ($field:ident) => {
                if self.$field.is_empty() {
                    return bad(format!("`{}` must not be empty", stringify!($field)));
                }
                let distinct: BTreeSet<String> = self.$field.iter().map(|v| format!("{v:?}")).collect();
                if distinct.len() != self.$field.len() {
                    return bad(format!("`{}` contains duplicate values", stringify!($field)));
                }
            };
        }
        axis!(samples);
        axis!(variables);
        axis!(alphas);
        axis!(complexities);
        axis!(structure_types);
        axis!(avg_levels);
        if self.algorithms.is_empty() {
            return bad("`algorithms` must not be empty".into());
        }
        if self.replicates == 0 {
            return bad("`replicates` must be at least 1".into());
        }
        let keys: BTreeSet<String> = self.algorithms.iter().map(algorithm_key).collect();
        if keys.len() != self.algorithms.len() {
            return bad("`algorithms` contains the same configuration twice".into());
        }
        for a in &self.algorithms {
            a.validate().map_err(|e| GridError::InvalidSpec(e.to_string()))?;
        }
        self.pcor.validate().map_err(|e| GridError::InvalidSpec(e.to_string()))?;
        // every axis value on its own, against the first value of the others
        let base = self.entry(0, 0, 0, 0, 0, 0, 0).config;
        let probes = self
            .samples
            .iter()
            .map(|&v| SynthesisConfig { num_samples: v, ..base.clone() })
            .chain(self.variables.iter().map(|&v| SynthesisConfig { num_variables: v, ..base.clone() }))
            .chain(self.alphas.iter().map(|&v| SynthesisConfig { alpha: v, ..base.clone() }))
            .chain(self.complexities.iter().map(|&v| SynthesisConfig { complexity: v, ..base.clone() }))
            .chain(self.avg_levels.iter().map(|&v| SynthesisConfig { avg_levels: v, ..base.clone() }));
        for probe in probes {
            probe.validate().map_err(|e| GridError::InvalidSpec(e.to_string()))?;
        }
        Ok(())
    }

    /// Number of datasets, `|enumerate_grid(self)|`, without materializing them.
    pub fn entry_count(&self) -> u64 {
        [
            self.samples.len(),
            self.variables.len(),
            self.alphas.len(),
            self.complexities.len(),
            self.structure_types.len(),
            self.avg_levels.len(),
            self.replicates as usize,
        ]
        .iter()
        .map(|&n| n as u64)
        .product()
    }

    #[allow(clippy::too_many_arguments)]
    fn entry(&self, s: usize, v: usize, a: usize, c: usize, t: usize, l: usize, replicate: u32) -> GridEntry {
        let mut config = SynthesisConfig {
            num_samples: self.samples[s],
            num_variables: self.variables[v],
            alpha: self.alphas[a],
            complexity: self.complexities[c],
            structure_type: self.structure_types[t],
            avg_levels: self.avg_levels[l],
            seed: 0,
        };
        config.seed = experiment_seed(self.global_seed, &config, replicate);
        GridEntry { config, replicate }
    }
}

/// Cartesian product of the axes times the replicates. Axes vary slowest to
/// fastest in field order (samples first, replicate last), each in the order
/// given in the `GridSpec`.
pub fn enumerate_grid(spec: &GridSpec) -> Vec<GridEntry> {
    let mut out = Vec::with_capacity(spec.entry_count() as usize);
    for s in 0..spec.samples.len() {
        for v in 0..spec.variables.len() {
            for a in 0..spec.alphas.len() {
                for c in 0..spec.complexities.len() {
                    for t in 0..spec.structure_types.len() {
                        for l in 0..spec.avg_levels.len() {
                            for r in 0..spec.replicates {
                                out.push(spec.entry(s, v, a, c, t, l, r));
                            }
                        }
                    }
                }
            }
        }
    }
    out
}

/// Seed of one experiment: the first 8 bytes (little endian) of the SHA-256 of
/// a canonical description of the global seed, the characteristics and the
/// replicate. The `seed` field of `config` is ignored.
pub fn experiment_seed(global_seed: u64, config: &SynthesisConfig, replicate: u32) -> u64 {
    let canonical = format!(
        "causal-datasheet/experiment/v1;global_seed={global_seed};samples={};variables={};alpha={:?};\
         complexity={};structure={};avg_levels={};replicate={replicate}",
        config.num_samples,
        config.num_variables,
        config.alpha,
        config.complexity,
        config.structure_type,
        config.avg_levels,
    );
    let digest = Sha256::digest(canonical.as_bytes());
    u64::from_le_bytes(digest[..8].try_into().expect("digest has 32 bytes"))
}

/// Canonical identity of a learner configuration.
pub(crate) fn algorithm_key(config: &LearnerConfig) -> String {
    serde_json::to_string(config).expect("learner configurations serialize")
}
