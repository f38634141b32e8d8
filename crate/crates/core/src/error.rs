use thiserror::Error;

/// Errors raised by the numerical kernels and model constructors.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: {left:?} vs {right:?}")]
    DimensionMismatch {
        context: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("matrix contains a non-finite entry")]
    NonFinite,

    /// A pivot fell below the relative floor during LU factorization.
    #[error("singular matrix in {context}")]
    Singular { context: &'static str },

    #[error("coefficient c[{index}] is zero")]
    ZeroC { index: usize },

    #[error("expansion point s0 = 0 is not supported")]
    ZeroExpansionPoint,

    /// The two matrices are not basis matrices of one nested subspace sequence.
    #[error(
        "not the same Krylov flag: residual {residual:e}, below-diagonal {below_diagonal:e}, \
         min diagonal {min_diagonal:e}"
    )]
    NotSameFlag {
        residual: f64,
        below_diagonal: f64,
        min_diagonal: f64,
    },

    #[error("Krylov sequence deflated to {available} columns, {requested} requested")]
    TooFewColumns { requested: usize, available: usize },

    #[error("index {index} out of range (limit {limit})")]
    OutOfRange { index: usize, limit: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
