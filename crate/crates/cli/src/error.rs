//! Error type carrying the exit code the process should report.

use std::fmt;

use predint_core::Error as CoreError;

pub type CliResult<T> = Result<T, CliError>;

/// Configuration and validation problems exit 2; numerical failures such as
/// non-convergence or excessive bootstrap failures exit 3.
#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    Config(String),
    Numeric(String),
}

impl CliError {
    pub fn config(message: impl Into<String>) -> Self {
        CliError::Config(message.into())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numeric(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(message) | CliError::Numeric(message) => f.write_str(message),
        }
    }
}

impl std::error::Error for CliError {}

/// Attaches context to a core error and sorts it into an exit class: bad
/// arguments are the user's configuration, everything data- or
/// iteration-driven is a numerical failure.
pub fn core_error(context: &str, err: CoreError) -> CliError {
    let message = format!("{context}: {err}");
    match err {
        CoreError::InvalidParameter(_)
        | CoreError::InvalidProbability { .. }
        | CoreError::InvalidArgument(_)
        | CoreError::UnsupportedFamily { .. } => CliError::Config(message),
        CoreError::DegenerateSample(_)
        | CoreError::NoConvergence { .. }
        | CoreError::RootNotBracketed { .. }
        | CoreError::ExcessiveFailures { .. }
        | CoreError::TruncationInsufficient { .. } => CliError::Numeric(message),
    }
}
