use std::collections::{BTreeSet, HashMap};
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::SynthesisConfig;

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("malformed CSV: {0}")]
    MalformedCsv(String),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("invalid dataset: {0}")]
    Invalid(String),
    #[error("sidecar JSON: {0}")]
    Sidecar(#[from] serde_json::Error),
}

impl From<csv::Error> for DatasetError {
    fn from(e: csv::Error) -> Self {
        match e.kind() {
            csv::ErrorKind::Io(_) => DatasetError::MalformedCsv(e.to_string()),
            _ => DatasetError::MalformedCsv(e.to_string()),
        }
    }
}

/// Column-oriented categorical table. Column `i` holds level codes in
/// `0..level_labels[i].len()`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dataset {
    variable_names: Vec<String>,
    columns: Vec<Vec<u16>>,
    level_labels: Vec<Vec<String>>,
}

/// Companion file written next to a dataset CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetSidecar {
    pub variables: Vec<String>,
    pub cardinalities: Vec<usize>,
    pub level_labels: Vec<Vec<String>>,
    pub num_samples: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config: Option<SynthesisConfig>,
}

impl Dataset {
    pub fn new(
        variable_names: Vec<String>,
        columns: Vec<Vec<u16>>,
        level_labels: Vec<Vec<String>>,
    ) -> Result<Self, DatasetError> {
        let m = variable_names.len();
        if columns.len() != m || level_labels.len() != m {
            return Err(DatasetError::Invalid("one column and one label list per variable".into()));
        }
        let rows = columns.first().map_or(0, Vec::len);
        for (i, col) in columns.iter().enumerate() {
            if col.len() != rows {
                return Err(DatasetError::Invalid(format!("column {i} has {} rows, expected {rows}", col.len())));
            }
            let card = level_labels[i].len();
            if let Some(bad) = col.iter().find(|&&c| c as usize >= card) {
                return Err(DatasetError::Invalid(format!("column {i}: code {bad} outside 0..{card}")));
            }
        }
        Ok(Dataset { variable_names, columns, level_labels })
    }

    /// Dataset with labels `"0".."r-1"` for each variable.
    pub fn from_codes(
        variable_names: Vec<String>,
        columns: Vec<Vec<u16>>,
        cardinalities: &[usize],
    ) -> Result<Self, DatasetError> {
        let labels = cardinalities.iter().map(|&r| (0..r).map(|k| k.to_string()).collect()).collect();
        Self::new(variable_names, columns, labels)
    }

    pub fn num_samples(&self) -> usize {
        self.columns.first().map_or(0, Vec::len)
    }

    pub fn num_variables(&self) -> usize {
        self.columns.len()
    }

    pub fn variable_names(&self) -> &[String] {
        &self.variable_names
    }

    pub fn column(&self, i: usize) -> &[u16] {
        &self.columns[i]
    }

    pub fn cardinality(&self, i: usize) -> usize {
        self.level_labels[i].len()
    }

    pub fn cardinalities(&self) -> Vec<usize> {
        (0..self.num_variables()).map(|i| self.cardinality(i)).collect()
    }

    pub fn level_labels(&self, i: usize) -> &[String] {
        &self.level_labels[i]
    }

    /// First `n` rows.
    pub fn head(&self, n: usize) -> Dataset {
        let n = n.min(self.num_samples());
        Dataset {
            variable_names: self.variable_names.clone(),
            columns: self.columns.iter().map(|c| c[..n].to_vec()).collect(),
            level_labels: self.level_labels.clone(),
        }
    }

    pub fn sidecar(&self, config: Option<SynthesisConfig>) -> DatasetSidecar {
        DatasetSidecar {
            variables: self.variable_names.clone(),
            cardinalities: self.cardinalities(),
            level_labels: self.level_labels.clone(),
            num_samples: self.num_samples(),
            config,
        }
    }

    /// Header row of variable names, one row per sample, cells as level labels.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<(), DatasetError> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(&self.variable_names)?;
        let mut record = Vec::with_capacity(self.num_variables());
        for row in 0..self.num_samples() {
            record.clear();
            for (i, col) in self.columns.iter().enumerate() {
                record.push(self.level_labels[i][col[row] as usize].as_str());
            }
            w.write_record(&record)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_csv_path(&self, path: &Path) -> Result<(), DatasetError> {
        self.write_csv(std::io::BufWriter::new(File::create(path)?))
    }

    /// Reads a CSV with a header row; every cell is a categorical label.
    ///
    /// Without a sidecar, levels are the distinct labels of each column, sorted
    /// numerically when all of them parse as numbers and lexicographically
    /// otherwise. With a sidecar, its label lists fix codes and cardinalities.
    pub fn read_csv<R: Read>(reader: R, sidecar: Option<&DatasetSidecar>) -> Result<Self, DatasetError> {
        let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
        let names: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
        if names.is_empty() {
            return Err(DatasetError::MalformedCsv("header row is empty".into()));
        }
        let mut raw: Vec<Vec<String>> = vec![Vec::new(); names.len()];
        for record in r.records() {
            let record = record?;
            for (i, cell) in record.iter().enumerate() {
                raw[i].push(cell.to_string());
            }
        }
        let labels: Vec<Vec<String>> = match sidecar {
            Some(s) => {
                if s.variables != names {
                    return Err(DatasetError::Invalid("sidecar variables differ from CSV header".into()));
                }
                s.level_labels.clone()
            }
            None => raw.iter().map(|col| sorted_levels(col)).collect(),
        };
        let mut columns = Vec::with_capacity(names.len());
        for (i, col) in raw.iter().enumerate() {
            if labels[i].len() > u16::MAX as usize {
                return Err(DatasetError::Invalid(format!("column {} has too many levels", names[i])));
            }
            let index: HashMap<&str, u16> =
                labels[i].iter().enumerate().map(|(k, l)| (l.as_str(), k as u16)).collect();
            let codes = col
                .iter()
                .map(|cell| {
                    index.get(cell.as_str()).copied().ok_or_else(|| {
                        DatasetError::Invalid(format!("label `{cell}` not declared for column {}", names[i]))
                    })
                })
                .collect::<Result<Vec<u16>, _>>()?;
            columns.push(codes);
        }
        Dataset::new(names, columns, labels)
    }

    pub fn read_csv_path(path: &Path, sidecar: Option<&DatasetSidecar>) -> Result<Self, DatasetError> {
        Self::read_csv(File::open(path)?, sidecar)
    }
}

fn sorted_levels(cells: &[String]) -> Vec<String> {
    let distinct: BTreeSet<&String> = cells.iter().collect();
    let mut levels: Vec<String> = distinct.into_iter().cloned().collect();
    let numeric: Option<Vec<f64>> = levels.iter().map(|l| l.trim().parse::<f64>().ok()).collect();
    if let Some(values) = numeric {
        let mut pairs: Vec<(f64, String)> = values.into_iter().zip(levels).collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
        levels = pairs.into_iter().map(|(_, l)| l).collect();
    }
    levels
}
