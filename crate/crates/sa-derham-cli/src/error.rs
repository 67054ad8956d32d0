use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },
    #[error("scene parse error: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("unresolved reference to {kind} '{id}'")]
    Unresolved { kind: &'static str, id: String },
    #[error("{kind} '{id}': {message}")]
    Invalid { kind: &'static str, id: String, message: String },
    #[error("{kind} '{id}': {source}")]
    Library { kind: &'static str, id: String, source: sa_derham::Error },
    #[error("bad --tol argument: {0}")]
    Tolerance(String),
    #[error("thread pool: {0}")]
    Threads(String),
}

impl CliError {
    pub fn invalid(kind: &'static str, id: &str, message: impl Into<String>) -> Self {
        CliError::Invalid { kind, id: id.to_string(), message: message.into() }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Parse { line: e.line(), column: e.column(), message: e.to_string() }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
