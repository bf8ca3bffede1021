use thiserror::Error;

/// Errors surfaced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("rectangle dimensions must be positive (got length {length}, width {width})")]
    BadRectDimensions { length: f64, width: f64 },

    #[error("margin must be non-negative (got {0})")]
    NegativeMargin(f64),

    #[error("covariance is not a valid symmetric PSD matrix: {0}")]
    InvalidCovariance(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("cost entries must be non-negative and not both zero")]
    BadCosts,

    #[error("horizon must satisfy 0 < dt <= t_f and margin >= 0")]
    BadHorizon,

    #[error("sigma-point spread must satisfy kappa > -n (got kappa {kappa} for dim {dim})")]
    BadSpread { kappa: f64, dim: usize },

    #[error("curve segment has non-positive length")]
    BadSegment,

    #[error("training diverged: non-finite loss at epoch {0}")]
    DivergentTraining(usize),

    #[error("training set is empty or inconsistent: {0}")]
    BadTrainingSet(String),

    #[error("scenario batch is empty")]
    EmptyBatch,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("model file: {0}")]
    ModelFormat(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
