use thiserror::Error;

/// Failure modes of a command, mapped onto process exit codes.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),

    #[error("parse error at byte {position}: {message}")]
    Parse { position: usize, message: String },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        2
    }
}

impl From<nary_core::Error> for CliError {
    fn from(e: nary_core::Error) -> Self {
        match e {
            nary_core::Error::Parse { position, message } => CliError::Parse { position, message },
            other => CliError::Input(other.to_string()),
        }
    }
}
