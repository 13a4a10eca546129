use alloc::string::String;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// A Cholesky pivot was not strictly positive.
    #[error("matrix is not positive definite (pivot {pivot} = {value:e})")]
    NotPositiveDefinite { pivot: usize, value: f64 },

    #[error("system is not stable: spectral radius {radius} is not below 1")]
    UnstableSystem { radius: f64 },

    #[error("linear system is numerically singular (condition estimate {condition:e})")]
    SingularSolve { condition: f64 },

    #[error("iteration did not converge after {iterations} steps")]
    NonConvergence { iterations: usize },

    #[error("regressors are rank deficient (collinear or constant columns)")]
    RankDeficientRegressors,

    #[error("column {column} has zero variance")]
    ZeroVariance { column: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    pub(crate) fn dims(msg: impl Into<String>) -> Self {
        Error::DimensionMismatch(msg.into())
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
