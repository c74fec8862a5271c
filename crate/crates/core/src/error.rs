use thiserror::Error;

/// Errors raised by the channel models, correlation builders and estimators.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid array geometry: {0}")]
    InvalidGeometry(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("harmonic ({0}, {1}) lies outside the propagating region")]
    Evanescent(i32, i32),

    #[error(
        "quadrature did not converge after {subdivisions} subdivisions \
         (estimate {estimate:e}, error bound {error:e})"
    )]
    QuadratureNonConvergence {
        estimate: f64,
        error: f64,
        subdivisions: usize,
    },

    #[error("eigendecomposition failed: {0}")]
    Eigen(String),

    #[error("linear solve failed: {0}")]
    Solve(String),
}

pub type Result<T> = std::result::Result<T, Error>;
