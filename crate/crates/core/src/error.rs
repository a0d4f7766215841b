use thiserror::Error;

/// Errors raised by the geometry, spectral and verification layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("point lies outside the open unit ball (|z| = {norm})")]
    OutsideBall { norm: f64 },

    #[error("dimension mismatch: expected {expected} real coordinates, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid mode index (k={k}, ell={ell}, m={m})")]
    InvalidMode { k: i64, ell: i64, m: i64 },

    #[error("Hopf chart is degenerate at s = {s}")]
    ChartPole { s: f64 },

    #[error("domain is not admissible: {0}")]
    Inadmissible(String),

    #[error("volume constraint violated: relative residual {residual:e}")]
    VolumeConstraint { residual: f64 },

    #[error("solver failed after {iterations} iterations: {reason} (residual {residual:e})")]
    SolverFailure {
        iterations: usize,
        residual: f64,
        reason: String,
    },

    #[error("numeric divergence: {0}")]
    Divergence(String),
}

pub type Result<T> = std::result::Result<T, Error>;
