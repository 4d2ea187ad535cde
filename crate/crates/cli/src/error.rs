use crate::expr::ParseError;
use thiserror::Error;

/// Exit status for a successful run.
pub const EXIT_OK: i32 = 0;
/// Bad flags, unparsable expressions, invalid profiles or grids.
pub const EXIT_USAGE: i32 = 1;
/// A verification check or an integration failed.
pub const EXIT_CHECK: i32 = 2;
/// Reading or writing a file failed.
pub const EXIT_IO: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error("{0}")]
    CheckFailed(String),

    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Core(#[from] disclination_core::Error),
}

impl CliError {
    pub fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        CliError::Io {
            context: context.into(),
            source,
        }
    }

    pub fn exit_code(&self) -> i32 {
        use disclination_core::Error as E;
        match self {
            CliError::Usage(_) | CliError::Parse(_) => EXIT_USAGE,
            CliError::CheckFailed(_) => EXIT_CHECK,
            CliError::Io { .. } => EXIT_IO,
            CliError::Core(e) => match e {
                E::IntegrationFailure { .. } | E::NotRotation { .. } | E::NotAntisymmetric { .. } => EXIT_CHECK,
                _ => EXIT_USAGE,
            },
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
