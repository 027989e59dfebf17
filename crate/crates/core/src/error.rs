use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by grid construction, spectral operators and the solver.
#[derive(Debug, Error)]
pub enum FlowError {
    #[error("grid too coarse: {n_points} points, need at least {min}")]
    GridTooCoarse { n_points: usize, min: usize },

    #[error("line half-width must be positive and finite, got {0}")]
    InvalidHalfwidth(f64),

    #[error("derivative order {order} exceeds the spectral guard {max} (n_points / 4)")]
    DerivativeOrder { order: usize, max: usize },

    #[error("field length {got} does not match grid size {expected}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("non-finite value at node {index}")]
    NonFinite { index: usize },

    #[error("step size {dt:e} fell below dt_min {dt_min:e}")]
    StepUnderflow { dt: f64, dt_min: f64 },

    #[error("diagnostics history is empty")]
    EmptyHistory,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("{path}: {message}")]
    InputFile { path: PathBuf, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = FlowError> = std::result::Result<T, E>;
