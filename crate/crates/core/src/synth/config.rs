use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::SynthError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StructureType {
    ForestFire,
    PreferentialAttachment,
    IcDag,
}

impl StructureType {
    pub const ALL: [StructureType; 3] =
        [StructureType::ForestFire, StructureType::PreferentialAttachment, StructureType::IcDag];

    pub fn as_str(self) -> &'static str {
        match self {
            StructureType::ForestFire => "forest_fire",
            StructureType::PreferentialAttachment => "preferential_attachment",
            StructureType::IcDag => "ic_dag",
        }
    }
}

impl fmt::Display for StructureType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for StructureType {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "forest_fire" | "ff" => Ok(StructureType::ForestFire),
            "preferential_attachment" | "pa" => Ok(StructureType::PreferentialAttachment),
            "ic_dag" | "icdag" => Ok(StructureType::IcDag),
            other => Err(format!(
                "unknown structure type `{other}` (expected forest_fire, preferential_attachment or ic_dag)"
            )),
        }
    }
}

/// One point of the characteristic space plus the seed of its RNG stream.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthesisConfig {
    pub num_samples: usize,
    pub num_variables: usize,
    /// Total Dirichlet concentration of every CPT row; small values give imbalanced rows.
    pub alpha: f64,
    /// Target edges-per-node ratio.
    pub complexity: u32,
    pub structure_type: StructureType,
    pub avg_levels: u32,
    pub seed: u64,
}

impl SynthesisConfig {
    pub fn validate(&self) -> Result<(), SynthError> {
        let fail = |m: &str| Err(SynthError::InvalidConfig(m.to_string()));
        if self.num_variables < 2 {
            return fail("num_variables must be at least 2");
        }
        if self.num_samples == 0 {
            return fail("num_samples must be positive");
        }
        if !(self.alpha.is_finite() && self.alpha > 0.0) {
            return fail("alpha must be a positive finite number");
        }
        if self.complexity == 0 {
            return fail("complexity must be positive");
        }
        if self.avg_levels < 2 {
            return fail("avg_levels must be at least 2");
        }
        Ok(())
    }
}

/// Accepted total edge counts for a generated graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeBand {
    pub target: usize,
    pub min: usize,
    pub max: usize,
}

impl EdgeBand {
    pub fn contains(&self, edges: usize) -> bool {
        (self.min..=self.max).contains(&edges)
    }
}

/// `complexity * n` clamped to `n(n-1)/2`, with a ±15% tolerance.
pub fn edge_band(num_variables: usize, complexity: u32) -> EdgeBand {
    let max_edges = num_variables * num_variables.saturating_sub(1) / 2;
    let target = (complexity as usize * num_variables).min(max_edges);
    let min = ((target as f64) * 0.85 - 1e-9).ceil() as usize;
    let max = (((target as f64) * 1.15 + 1e-9).floor() as usize).min(max_edges);
    EdgeBand { target, min: min.min(target), max: max.max(target) }
}
