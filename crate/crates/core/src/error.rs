use thiserror::Error;

/// Errors produced by generators, the confidence-set geometry, agents and the sweep harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    #[error(
        "feature generation exhausted {attempts} attempts at row {row}: \
         n_actions={n_actions}, dim={dim}, epsilon={epsilon} \
         (near-orthogonal features are guaranteed only when dim >= 8 ln(n_actions)/epsilon^2 = {required_dim:.1})"
    )]
    AttemptsExhausted {
        row: usize,
        attempts: usize,
        n_actions: usize,
        dim: usize,
        epsilon: f64,
        required_dim: f64,
    },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    #[error("confidence set is empty (residual constraint excludes the unit ball)")]
    InfeasibleSet,

    #[error("dual solver did not converge: duality gap {gap:e} above tolerance {tol:e}")]
    NoConvergence { gap: f64, tol: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for errors caused by bad caller input rather than runtime conditions.
    pub fn is_validation(&self) -> bool {
        matches!(self, Error::InvalidParam(_) | Error::DimensionMismatch { .. })
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParam(msg.into())
}
