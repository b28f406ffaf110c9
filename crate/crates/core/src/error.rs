use num_complex::Complex64;
use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain where a product or matrix is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// An infinite product did not reach the deviation floor in time.
    #[error("truncation did not converge within {max_terms} terms per base")]
    Truncation { max_terms: usize },

    /// A denominator vanishes (or nearly so) at the requested point.
    #[error("pole in {what} at log argument {log_arg} (smallest factor {margin:.3e})")]
    Pole {
        what: String,
        log_arg: Complex64,
        margin: f64,
    },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("size limit: {0}")]
    Size(String),

    #[error("invalid R-matrix kind: {0}")]
    Kind(String),

    /// A matrix that must be inverted is too badly conditioned.
    #[error("matrix is numerically singular (condition number {condition:.3e})")]
    Singular { condition: f64 },

    #[error("solver did not converge: {0}")]
    Convergence(String),

    #[error("configuration error: {0}")]
    Config(String),
}

impl Error {
    pub fn is_pole(&self) -> bool {
        matches!(self, Error::Pole { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
