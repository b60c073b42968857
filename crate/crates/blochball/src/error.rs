use std::process::ExitCode;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Unreadable, malformed or inconsistent input.
    #[error("configuration error: {0}")]
    Config(String),
    /// The model is well formed but the requested computation is infeasible.
    #[error("physics error: {0}")]
    Physics(String),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Config(_) => ExitCode::from(2),
            CliError::Physics(_) => ExitCode::from(3),
        }
    }
}

impl From<blochball_core::Error> for CliError {
    fn from(e: blochball_core::Error) -> Self {
        if e.is_input_error() {
            CliError::Config(e.to_string())
        } else {
            CliError::Physics(e.to_string())
        }
    }
}
