//! Unified error type for the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Spec-string syntax error with a byte position into the input.
    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    /// Structurally valid spec that violates a domain constraint.
    #[error("semantic error: {0}")]
    Semantic(String),

    /// The requested series does not converge.
    #[error("divergent series: {0}")]
    Divergent(String),

    /// Inner depth or weight outside what the engines support.
    #[error("unsupported degree: {0}")]
    UnsupportedDegree(String),

    /// The parity theorems cannot reduce this spec.
    #[error("not reducible by parity: {0}")]
    NotReducibleByParity(String),

    /// Parameters outside the stated domain of the requested identity.
    #[error("domain violation: {0}")]
    DomainViolation(String),

    /// A constant outside the supported basis.
    #[error("unsupported constant: {0}")]
    UnsupportedConstant(String),

    /// Alternating-series acceleration applied to a non-alternating sum.
    #[error("non-alternating series: {0}")]
    NonAlternating(String),

    /// Sequence primitive undefined for the requested parameters.
    #[error("undefined primitive: {0}")]
    UndefinedPrimitive(String),

    /// A regression suite references golden data that is not present.
    #[error("missing golden data: {0}")]
    MissingGoldenData(String),

    /// A data file failed to parse or failed its load-time validation.
    #[error("invalid data: {0}")]
    Data(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
