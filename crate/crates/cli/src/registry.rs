//! The patient registry: a canonical CSV file on disk.
//!
//! Appends keep the existing bytes untouched and are written to a temporary
//! file in the same directory, then renamed over the registry.

use std::fs;
use std::io::{ErrorKind, Write};
use std::path::{Path, PathBuf};

use pearson_triage::model::{canonical_header, parse_dataset, Dataset, ParseMode};

use crate::error::CliError;

pub struct Registry {
    path: PathBuf,
    text: Option<String>,
    dataset: Dataset,
}

impl Registry {
    /// Opens an existing registry; a missing file is an I/O error.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let dataset =
            parse_dataset(&text, ParseMode::Strict).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
        Ok(Self {
            path: path.to_path_buf(),
            text: Some(text),
            dataset,
        })
    }

    /// Opens a registry, treating a missing file as empty.
    pub fn open_or_empty(path: &Path) -> Result<Self, CliError> {
        match fs::read_to_string(path) {
            Ok(_) => Self::load(path),
            Err(e) if e.kind() == ErrorKind::NotFound => Ok(Self {
                path: path.to_path_buf(),
                text: None,
                dataset: Dataset::default(),
            }),
            Err(e) => Err(CliError::io(path, e)),
        }
    }

    /// Dataset for commands that need at least one patient.
    pub fn nonempty(&self) -> Result<&Dataset, CliError> {
        if self.dataset.is_empty() {
            Err(CliError::Data(format!("registry {} is empty", self.path.display())))
        } else {
            Ok(&self.dataset)
        }
    }

    /// Appends all records or none. Returns the number appended.
    pub fn append(&mut self, incoming: &Dataset) -> Result<usize, CliError> {
        for r in incoming.records() {
            if self.dataset.get(r.id()).is_some() {
                return Err(CliError::Data(format!("duplicate id {}", r.id())));
            }
        }
        let mut text = match &self.text {
            Some(t) => t.clone(),
            None => format!("{}\n", canonical_header()),
        };
        if !text.is_empty() && !text.ends_with('\n') {
            text.push('\n');
        }
        for r in incoming.records() {
            text.push_str(&r.to_csv_line());
            text.push('\n');
        }
        let merged = parse_dataset(&text, ParseMode::Strict).map_err(CliError::data)?;
        write_atomic(&self.path, text.as_bytes())?;
        self.text = Some(text);
        self.dataset = merged;
        Ok(incoming.len())
    }
}

/// Writes via a sibling temporary file and a rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| CliError::io(path, e))?;
    tmp.write_all(bytes).map_err(|e| CliError::io(path, e))?;
    tmp.as_file().sync_all().map_err(|e| CliError::io(path, e))?;
    tmp.persist(path).map_err(|e| CliError::io(path, e.error))?;
    Ok(())
}
