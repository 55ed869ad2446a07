use thiserror::Error;

/// Errors raised by the kernels, solvers and generators.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum L1Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: {what} (expected {expected}, got {got})")]
    DimensionMismatch { what: &'static str, expected: usize, got: usize },

    #[error("matrix is not positive definite (pivot {pivot} = {value:e})")]
    NotPositiveDefinite { pivot: usize, value: f64 },

    #[error("ill-conditioned system: {0}")]
    IllConditioned(String),

    #[error("numerical breakdown: {0}")]
    NumericalBreakdown(String),

    #[error("degenerate active set: {0}")]
    DegenerateSupport(String),
}

pub type Result<T> = std::result::Result<T, L1Error>;

pub(crate) fn check_len(what: &'static str, expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(L1Error::DimensionMismatch { what, expected, got })
    }
}
