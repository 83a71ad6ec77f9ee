use std::collections::HashSet;
use std::fmt;
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::DatasheetError;

/// Properties of a dataset its designer controls or can compute directly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObservableCharacteristics {
    pub num_samples: usize,
    pub num_variables: usize,
    pub avg_levels: f64,
}

impl ObservableCharacteristics {
    pub fn validate(&self) -> Result<(), DatasheetError> {
        if self.num_samples == 0 || self.num_variables == 0 || !(self.avg_levels > 0.0 && self.avg_levels.is_finite()) {
            return Err(DatasheetError::InvalidRequest(format!(
                "observable characteristics must all be positive, got {self:?}"
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Warning {
    /// The column holds one distinct label and carries no information.
    SingleLevel { column: String },
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Warning::SingleLevel { column } => write!(f, "column `{column}` has a single level"),
        }
    }
}

/// Characteristics of a categorical CSV file with a header row.
pub fn extract_characteristics(path: &Path) -> Result<(ObservableCharacteristics, Vec<Warning>), DatasheetError> {
    let file = std::fs::File::open(path)
        .map_err(|e| DatasheetError::MalformedCsv(format!("{}: {e}", path.display())))?;
    extract_from_reader(file)
}

/// [`extract_characteristics`] over any reader. Every cell is a label; the
/// empty string is a label too.
pub fn extract_from_reader<R: Read>(reader: R) -> Result<(ObservableCharacteristics, Vec<Warning>), DatasheetError> {
    let malformed = |e: csv::Error| DatasheetError::MalformedCsv(e.to_string());
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let header: Vec<String> = rdr.headers().map_err(malformed)?.iter().map(str::to_string).collect();
    if header.is_empty() || header.iter().all(|h| h.is_empty()) {
        return Err(DatasheetError::MalformedCsv("missing header row".into()));
    }
    let mut labels: Vec<HashSet<String>> = vec![HashSet::new(); header.len()];
    let mut rows = 0usize;
    for record in rdr.records() {
        let record = record.map_err(malformed)?;
        for (set, cell) in labels.iter_mut().zip(record.iter()) {
            if !set.contains(cell) {
                set.insert(cell.to_string());
            }
        }
        rows += 1;
    }
    if rows == 0 {
        return Err(DatasheetError::MalformedCsv("no data rows".into()));
    }
    let total: usize = labels.iter().map(HashSet::len).sum();
    let warnings = header
        .iter()
        .zip(&labels)
        .filter(|(_, set)| set.len() == 1)
        .map(|(name, _)| Warning::SingleLevel { column: name.clone() })
        .collect();
    let observables = ObservableCharacteristics {
        num_samples: rows,
        num_variables: header.len(),
        avg_levels: total as f64 / header.len() as f64,
    };
    Ok((observables, warnings))
}
