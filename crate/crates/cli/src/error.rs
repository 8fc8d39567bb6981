use std::io;
use std::path::Path;

use thiserror::Error;

/// Every failure the CLI reports, each with its process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("{summary}")]
    Infeasible { summary: String, detail: String },
    #[error("{0} oracle mismatch(es) on exact designs")]
    OracleMismatch(usize),
    #[error("{0}")]
    Overflow(String),
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Other(String),
}

impl CliError {
    pub fn io(path: &Path, e: io::Error) -> Self {
        CliError::Io(format!("{}: {e}", path.display()))
    }

    pub fn code(&self) -> u8 {
        match self {
            CliError::Parse(_) => 2,
            CliError::Infeasible { .. } => 3,
            CliError::OracleMismatch(_) => 4,
            CliError::Overflow(_) => 5,
            CliError::Usage(_) | CliError::Io(_) | CliError::Other(_) => 1,
        }
    }

    /// Extra lines printed after the message, such as violation listings.
    pub fn detail(&self) -> Option<&str> {
        match self {
            CliError::Infeasible { detail, .. } if !detail.is_empty() => Some(detail),
            _ => None,
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
