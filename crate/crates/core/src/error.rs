//! Error type shared by every module of the crate.

use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid measure space: {0}")]
    InvalidSpace(String),

    #[error("operands live over different measure spaces")]
    SpaceMismatch,

    #[error("operands live over different bundles")]
    BundleMismatch,

    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("value at atom `{atom}` is not real: {value}")]
    NotReal { atom: String, value: Complex64 },

    #[error("unknown atom `{0}`")]
    UnknownAtom(String),

    #[error("invalid partition of unity: {0}")]
    InvalidPartition(String),

    #[error("invalid fiber descriptor: {0}")]
    InvalidDescriptor(String),

    #[error("fiber descriptor mismatch: {left} vs {right}")]
    DescriptorMismatch { left: String, right: String },

    #[error("fiber data has {found} entries, descriptor {descriptor} needs {expected}")]
    ShapeMismatch {
        descriptor: String,
        expected: usize,
        found: usize,
    },

    #[error("eigenvalue iteration did not converge after {iterations} iterations")]
    NonConvergence {
        iterations: usize,
        partial: Vec<Complex64>,
    },

    #[error("precondition failed at atom `{atom}`: {reason}")]
    Precondition { atom: String, reason: String },

    #[error("Neumann series would need {needed} terms (cap {cap})")]
    SeriesCap { needed: f64, cap: usize },

    #[error("element is not invertible at atoms {atoms:?}")]
    NotInvertible { atoms: Vec<String> },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("consistency check failed: {0}")]
    CheckFailed(String),

    #[error("scenario error at {path}: {message}")]
    Scenario { path: String, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
