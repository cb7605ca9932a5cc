use thiserror::Error;

use dynamo_spectra::Error as CoreError;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("degenerate mathematics: {0}")]
    Math(String),
    #[error("I/O error: {0}")]
    Io(String),
    #[error("resource cap: {0}")]
    Cap(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Math(_) => 3,
            CliError::Io(_) => 4,
            CliError::Cap(_) => 5,
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        let msg = e.to_string();
        match e {
            CoreError::InvalidInput(_)
            | CoreError::Contract(_)
            | CoreError::SliceRequired { .. } => CliError::Config(msg),
            CoreError::DegeneratePencil { .. }
            | CoreError::DegenerateConstraint(_)
            | CoreError::UndefinedLog { .. } => CliError::Math(msg),
            CoreError::CapExceeded { .. } => CliError::Cap(msg),
        }
    }
}
