use std::collections::HashSet;
use std::fs::{File, OpenOptions};
use std::io::{self, BufRead, BufReader, Read, Seek, SeekFrom, Write};
use std::path::{Path, PathBuf};

use super::{ExperimentRecord, GridError};

/// Append-only JSON-Lines results file with an in-memory key index.
pub struct ResultStore {
    path: PathBuf,
    file: File,
    keys: HashSet<String>,
}

impl ResultStore {
    /// Creates (or truncates) `path`.
    pub fn create(path: &Path) -> Result<Self, GridError> {
        let file = File::create(path).map_err(|e| io_error(path, e))?;
        Ok(ResultStore { path: path.to_path_buf(), file, keys: HashSet::new() })
    }

    /// Opens `path` for appending, creating it if needed, and returns the
    /// records already present. A trailing line without its newline (an
    /// interrupted append) is cut off.
    pub fn resume(path: &Path) -> Result<(Self, Vec<ExperimentRecord>), GridError> {
        let mut file = OpenOptions::new()
            .read(true)
            .append(true)
            .create(true)
            .open(path)
            .map_err(|e| io_error(path, e))?;
        let mut bytes = Vec::new();
        file.read_to_end(&mut bytes).map_err(|e| io_error(path, e))?;
        let complete = bytes.iter().rposition(|&b| b == b'\n').map_or(0, |i| i + 1);
        if complete < bytes.len() {
            file.set_len(complete as u64).map_err(|e| io_error(path, e))?;
            file.seek(SeekFrom::End(0)).map_err(|e| io_error(path, e))?;
        }
        let records = parse_lines(&bytes[..complete])?;
        let keys = records.iter().map(ExperimentRecord::key).collect();
        Ok((ResultStore { path: path.to_path_buf(), file, keys }, records))
    }

    pub fn contains(&self, key: &str) -> bool {
        self.keys.contains(key)
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    /// Writes one record as a single line and flushes it. Records whose key is
    /// already stored are skipped; returns whether the record was written.
    pub fn append(&mut self, record: &ExperimentRecord) -> Result<bool, GridError> {
        let key = record.key();
        if self.keys.contains(&key) {
            return Ok(false);
        }
        let mut line = serde_json::to_string(record).expect("records serialize");
        line.push('\n');
        self.file.write_all(line.as_bytes()).map_err(|e| io_error(&self.path, e))?;
        self.file.flush().map_err(|e| io_error(&self.path, e))?;
        self.keys.insert(key);
        Ok(true)
    }
}

/// Reads every complete record of a results file; an unterminated last line is ignored.
pub fn load_records(path: &Path) -> Result<Vec<ExperimentRecord>, GridError> {
    let file = File::open(path).map_err(|e| io_error(path, e))?;
    let mut reader = BufReader::new(file);
    let mut records = Vec::new();
    let mut line = String::new();
    let mut number = 0;
    loop {
        line.clear();
        if reader.read_line(&mut line).map_err(|e| io_error(path, e))? == 0 || !line.ends_with('\n') {
            return Ok(records);
        }
        number += 1;
        if let Some(r) = parse_line(&line, number)? {
            records.push(r);
        }
    }
}

fn parse_lines(bytes: &[u8]) -> Result<Vec<ExperimentRecord>, GridError> {
    let text = std::str::from_utf8(bytes)
        .map_err(|e| GridError::CorruptStore { line: 0, message: format!("not UTF-8: {e}") })?;
    let mut records = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if let Some(r) = parse_line(line, i + 1)? {
            records.push(r);
        }
    }
    Ok(records)
}

fn parse_line(line: &str, number: usize) -> Result<Option<ExperimentRecord>, GridError> {
    if line.trim().is_empty() {
        return Ok(None);
    }
    serde_json::from_str(line)
        .map(Some)
        .map_err(|e| GridError::CorruptStore { line: number, message: e.to_string() })
}

fn io_error(path: &Path, source: io::Error) -> GridError {
    GridError::Io { path: path.to_path_buf(), source }
}
