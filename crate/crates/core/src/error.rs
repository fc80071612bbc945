use thiserror::Error;

/// Errors produced by the numerical routines in this crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("inadmissible ball pair: {0}")]
    Admissibility(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("mass mismatch: density mass {mass}, ball volume {ball} (relative error {rel:.3e})")]
    MassMismatch { mass: f64, ball: f64, rel: f64 },

    #[error("quadrature did not converge: achieved {achieved:.3e}, target {target:.3e}")]
    Quadrature { achieved: f64, target: f64 },

    #[error("internal consistency check failed: {0}")]
    Consistency(String),

    #[error("certification failed: {0}")]
    Certification(String),

    #[error(
        "solver failed after {iterations} iterations (best residual {residual:.3e}): {reason}"
    )]
    Solver {
        iterations: usize,
        residual: f64,
        reason: String,
    },

    #[error("missing ledger entry `{0}`")]
    MissingEntry(String),

    #[error("serialization: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
