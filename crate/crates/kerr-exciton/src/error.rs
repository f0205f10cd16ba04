//! Error type shared by all modules.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Probability weight outside the retained Fock levels exceeds budget.
    #[error("truncation leakage {leakage:.3e} exceeds budget {budget:.3e} ({context})")]
    TruncationLeakage {
        leakage: f64,
        budget: f64,
        context: String,
    },

    /// Requested Fock level does not exist in the truncated space.
    #[error("Fock level {level} out of range for dimension {dim}")]
    IndexOutOfRange { level: usize, dim: usize },

    /// Operands live in differently shaped Hilbert spaces.
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: String, right: String },

    /// State fails a positivity, norm, trace or hermiticity requirement.
    #[error("nonphysical state: {0}")]
    NonphysicalState(String),

    /// Invalid parameter set or scenario configuration.
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
