//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by realization algebra and the numeric kernels.
#[derive(Debug, Error)]
pub enum Error {
    /// Matrix dimensions do not line up for the requested operation.
    #[error("dimension mismatch in {context}: expected {expected}, got {found}")]
    DimMismatch {
        context: &'static str,
        expected: String,
        found: String,
    },

    /// A pivot fell below the singularity threshold during elimination.
    #[error("matrix is singular to tolerance (pivot magnitude {pivot:.3e} < {threshold:.3e})")]
    Singular { pivot: f64, threshold: f64 },

    /// An entry was NaN or infinite.
    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    /// The state matrix is not a contraction, so series formulas diverge.
    #[error("Stein equation not contractive: spectral radius {rho:.6} >= 1")]
    NotContractive { rho: f64 },

    /// Evaluation point collides with a pole of the function.
    #[error("evaluation point ({re}, {im}) is a pole to tolerance")]
    Pole { re: f64, im: f64 },

    /// A normalization convention required by the operation does not hold.
    #[error("convention violation: {0}")]
    Convention(String),

    /// Invalid argument or precondition failure.
    #[error("{0}")]
    Invalid(String),

    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn dims(
        context: &'static str,
        expected: impl Into<String>,
        found: impl Into<String>,
    ) -> Self {
        Error::DimMismatch {
            context,
            expected: expected.into(),
            found: found.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
