use periodlab_core::period_lab::describe_failure;
use serde::Serialize;
use thiserror::Error;

/// Everything that can stop a run.
#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Domain(#[from] periodlab_core::Error),
    #[error("schema error: {0}")]
    Schema(String),
    #[error("unsupported format: {0}")]
    UnsupportedFormat(String),
    #[error("io error: {0}")]
    Io(String),
    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, CliError>;

/// The JSON object written to stderr on failure.
#[derive(Debug, Serialize)]
pub struct ErrorMessage {
    pub code: &'static str,
    pub message: String,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub details: Vec<String>,
}

impl CliError {
    pub fn code(&self) -> &'static str {
        match self {
            CliError::Domain(e) => e.code(),
            CliError::Schema(_) => "cli.SchemaError",
            CliError::UnsupportedFormat(_) => "cli.UnsupportedFormat",
            CliError::Io(_) => "cli.Io",
            CliError::Internal(_) => "cli.Internal",
        }
    }

    /// 2 for errors caused by the input, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Domain(_) | CliError::Schema(_) | CliError::UnsupportedFormat(_) => 2,
            CliError::Io(_) | CliError::Internal(_) => 1,
        }
    }

    pub fn message(&self) -> ErrorMessage {
        let details = match self {
            CliError::Domain(periodlab_core::Error::Counterexample(report)) => {
                report.failures.iter().map(describe_failure).collect()
            }
            _ => Vec::new(),
        };
        ErrorMessage { code: self.code(), message: self.to_string(), details }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Schema(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
