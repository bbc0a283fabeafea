use thiserror::Error;

/// Harness-level errors, each mapped to a process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("validation error: {0}")]
    Validation(String),

    #[error("I/O error: {0}")]
    Io(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Validation(_) => 2,
            Self::Io(_) => 3,
            Self::InsufficientData(_) => 4,
        }
    }
}

impl From<bso_core::Error> for CliError {
    fn from(err: bso_core::Error) -> Self {
        match err {
            bso_core::Error::InsufficientData(msg) => Self::InsufficientData(msg),
            other => Self::Validation(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(err: std::io::Error) -> Self {
        Self::Io(err.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(err: csv::Error) -> Self {
        Self::Io(err.to_string())
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
