//! Exit codes, errors and atomic file output.

use std::io::Write;
use std::path::{Path, PathBuf};

use tempfile::NamedTempFile;

pub const EXIT_TRUE: i32 = 0;
pub const EXIT_FALSE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_CAP: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] ksmc::Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    Usage(String),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) if e.is_cap() => EXIT_CAP,
            CliError::Core(ksmc::Error::VacuousAnnouncement { .. }) => EXIT_FALSE,
            _ => EXIT_USAGE,
        }
    }

    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io { path: path.to_path_buf(), source }
    }
}

impl From<ksmc::lang::LangError> for CliError {
    fn from(e: ksmc::lang::LangError) -> Self {
        CliError::Core(e.into())
    }
}

/// What a subcommand produced: the text for stdout (or `--out`) and the
/// exit code.
pub struct Outcome {
    pub code: i32,
    pub text: String,
}

impl Outcome {
    pub fn verdict(holds: bool, text: String) -> Self {
        Outcome { code: if holds { EXIT_TRUE } else { EXIT_FALSE }, text }
    }

    pub fn success(text: String) -> Self {
        Outcome { code: EXIT_TRUE, text }
    }
}

pub fn read_file(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

/// Writes through a temporary file in the target directory and renames it
/// into place, so readers never see a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = NamedTempFile::new_in(dir).map_err(|e| CliError::io(path, e))?;
    tmp.write_all(bytes).map_err(|e| CliError::io(path, e))?;
    tmp.persist(path).map_err(|e| CliError::io(path, e.error))?;
    Ok(())
}

pub fn to_json(value: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("json values always serialize");
    s.push('\n');
    s
}

pub fn state_text(names: &[String]) -> String {
    names.join(",")
}
