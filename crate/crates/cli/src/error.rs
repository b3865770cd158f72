use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("malformed CSV{}: {message}", line.map(|l| format!(" at line {l}")).unwrap_or_default())]
    MalformedCsv { line: Option<u64>, message: String },
    #[error("unknown column {0:?}")]
    UnknownColumn(String),
    #[error("non-numeric value {value:?} in column {column:?} at data row {row}")]
    NonNumericValue {
        column: String,
        row: usize,
        value: String,
    },
    #[error("invalid experiment config: {0}")]
    InvalidConfig(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("report table is empty")]
    NonemptyTableRequired,
    #[error("I/O failure on {path}: {source}")]
    IoFailure {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Core(#[from] semicentroid::Error),
}

impl CliError {
    pub(crate) fn io(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> CliError {
        let path = path.into();
        move |source| CliError::IoFailure { path, source }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::MalformedCsv {
            line: e.position().map(|p| p.line()),
            message: e.to_string(),
        }
    }
}
