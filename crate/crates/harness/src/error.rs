use std::path::{Path, PathBuf};

use thiserror::Error;

/// Failures of the harness layer: input parsing, configuration and the
/// numerical core underneath.
#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("{}:{line}:{column}: {message}", path.display())]
    Parse { path: PathBuf, line: usize, column: usize, message: String },
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{}: {source}", path.display())]
    InvalidModel { path: PathBuf, source: morh2w_core::Error },
    #[error("invalid band: need 0 < lo < hi, got [{lo}, {hi}]")]
    InvalidBand { lo: f64, hi: f64 },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{method} failed with {kind}: {message}")]
    CellFailed { method: String, kind: String, message: String },
    #[error(transparent)]
    Numerical(#[from] morh2w_core::Error),
}

pub type Result<T> = std::result::Result<T, HarnessError>;

impl HarnessError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        HarnessError::Io { path: path.to_path_buf(), source }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            HarnessError::Parse { .. } => "ParseError",
            HarnessError::Io { .. } => "IoError",
            HarnessError::InvalidModel { source, .. } => source.kind(),
            HarnessError::InvalidBand { .. } => "InvalidBand",
            HarnessError::Config(_) => "InvalidConfig",
            HarnessError::CellFailed { .. } => "CellFailed",
            HarnessError::Numerical(e) => e.kind(),
        }
    }

    /// Process exit code: 2 for failures inside the numerical core, 1 for
    /// bad input.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Numerical(_) | HarnessError::CellFailed { .. } => 2,
            _ => 1,
        }
    }
}
