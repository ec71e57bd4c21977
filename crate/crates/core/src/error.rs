use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid network: {0}")]
    InvalidNetwork(String),

    #[error("invalid growth function: {0}")]
    InvalidGrowth(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("non-finite value: {0}")]
    NonFinite(String),

    #[error("quasi-norm bisection diverged: Γ(f/θ) > 1 for every θ up to 2^60")]
    Divergence,

    #[error("indeterminate verdict: margin {margin} of an estimated γ* lies within 2·{tol}")]
    Indeterminate { margin: f64, tol: f64 },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("sample budget too small: {0}")]
    Budget(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
