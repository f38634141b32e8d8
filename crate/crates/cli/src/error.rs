use thiserror::Error;

use crate::mm::MmError;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("matrix file {path}: {source}")]
    Matrix {
        path: String,
        #[source]
        source: MmError,
    },
    #[error("{0}")]
    Core(#[from] blockkrylov::Error),
    #[error("consistency check failed: {0}")]
    Consistency(String),
    #[error("output: {0}")]
    Output(String),
}

impl CliError {
    /// Process exit code: 2 parse/config, 3 singular pencil, 4 deflation
    /// exhausted, 5 internal consistency failure.
    pub fn exit_code(&self) -> i32 {
        use blockkrylov::Error as E;
        match self {
            CliError::Config(_) | CliError::Matrix { .. } | CliError::Output(_) => 2,
            CliError::Consistency(_) => 5,
            CliError::Core(e) => match e {
                E::Singular { .. } => 3,
                E::TooFewColumns { .. } => 4,
                E::NotSameFlag { .. } => 5,
                E::DimensionMismatch { .. }
                | E::InvalidInput(_)
                | E::NonFinite
                | E::ZeroC { .. }
                | E::ZeroExpansionPoint
                | E::OutOfRange { .. } => 2,
            },
        }
    }
}
