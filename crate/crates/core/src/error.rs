use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid axis {0}, expected 1, 2 or 3")]
    InvalidAxis(usize),

    #[error("degenerate eigenvector: {0}")]
    Degenerate(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("profile error: {0}")]
    Profile(String),

    #[error("gradient catastrophe: |phi| = {phi:e}")]
    GradientCatastrophe { phi: f64 },

    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("construction failed: {0}")]
    Construction(String),

    #[error("sampling failed: {0}")]
    Sampling(String),

    #[error("verification input error: {0}")]
    Verification(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
