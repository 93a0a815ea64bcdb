use thiserror::Error;

use crate::poly::RootSet;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("need at least {needed} coefficients, got {got}")]
    InsufficientCoefficients { needed: usize, got: usize },

    /// `A_m^(n)` is singular or too badly conditioned for a normalized denominator.
    #[error("degenerate Toeplitz system A_{m}^({n}): {reason}")]
    DegenerateSystem { m: usize, n: usize, reason: String },

    #[error("root finder stopped after {iterations} iterations with residual {residual:e}")]
    NonConvergence {
        iterations: usize,
        residual: f64,
        best: Box<RootSet>,
    },

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("end coefficient below the zero threshold")]
    EndCoefficientZero,

    #[error("index {index} out of range for {len} roots")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid config: {0}")]
    InvalidConfig(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
