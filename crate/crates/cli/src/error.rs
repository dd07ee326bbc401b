use std::path::PathBuf;

use thiserror::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_RUNTIME: i32 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags, missing inputs or an invalid configuration.
    #[error("{0}")]
    Usage(String),

    #[error("config {}: {message}", path.display())]
    Config { path: PathBuf, message: String },

    #[error(transparent)]
    Core(#[from] proxnet_core::Error),
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    pub fn exit_code(&self) -> i32 {
        use proxnet_core::Error as E;
        match self {
            CliError::Usage(_) | CliError::Config { .. } => EXIT_VALIDATION,
            CliError::Core(e) => match e {
                E::InvalidParameter(_)
                | E::EmptyInput(_)
                | E::InsufficientData { .. }
                | E::Format(_)
                | E::KeyMismatch(_)
                | E::Validation(_)
                | E::Json(_) => EXIT_VALIDATION,
                E::Csv(c) if !c.is_io_error() => EXIT_VALIDATION,
                _ => EXIT_RUNTIME,
            },
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
