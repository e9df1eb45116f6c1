use thiserror::Error;

/// Errors raised by the solver library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("mesh mismatch: h = {left} vs h = {right}")]
    MeshMismatch { left: f64, right: f64 },

    #[error("length mismatch: expected {expected} values, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("unsupported norm exponent p = {0} (allowed: 1, 2, inf)")]
    UnsupportedNorm(f64),

    #[error("non-finite value {value} at x = {x}")]
    NonFinite { x: f64, value: f64 },

    #[error("invalid kernel: {0}")]
    InvalidKernel(String),

    #[error("invalid nonlinearity: {0}")]
    InvalidNonlinearity(String),

    #[error("invalid integrator configuration: {0}")]
    InvalidConfig(String),

    #[error("run diverged: {0}")]
    Diverged(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
