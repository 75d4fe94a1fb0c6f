//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by construction, interpolation and verification.
#[derive(Debug, Error)]
pub enum Error {
    /// A user-supplied parameter failed validation (maps to the usage exit code).
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A numeric string (decimal value or variable name) could not be parsed.
    #[error("parse error: {0}")]
    Parse(String),

    /// An evaluation assignment is missing one of the polynomial's variables.
    #[error("missing variable in assignment: {0}")]
    MissingVariable(String),

    /// Interpolation nodes closer than the working-precision separation limit.
    #[error("interpolation nodes are not pairwise distinct at working precision")]
    DuplicateNodes,

    /// Interpolation data with no nodes or no prescribed values.
    #[error("empty interpolation data")]
    EmptyData,

    /// The confluent Vandermonde system is numerically singular (node clustering).
    #[error("linear system numerically singular at working precision")]
    SingularSystem,

    /// A derivative order outside the range covered by the registry.
    #[error("order k={k} outside registry range 2..={k_max}")]
    KOutOfRange { k: u32, k_max: u32 },

    /// An upper-bound estimate failed its independent dense-grid validation.
    #[error("bound validation failed: {0}")]
    BoundValidation(String),

    /// A constructed member failed one of its verification checks.
    #[error("verification failed at stage `{stage}` for member n={n}: {detail}")]
    VerificationFailed {
        stage: &'static str,
        n: u32,
        detail: String,
    },

    /// A pipeline stage aborted while building one member.
    #[error("stage `{stage}` failed for member n={n}: {source}")]
    StageFailed {
        stage: &'static str,
        n: u32,
        #[source]
        source: Box<Error>,
    },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// CLI exit code class: 1 verification failure, 2 usage error, 3 internal.
    pub fn exit_code(&self) -> u8 {
        match self {
            Error::VerificationFailed { .. } => 1,
            Error::InvalidParameter(_) | Error::Parse(_) => 2,
            Error::StageFailed { source, .. } => source.exit_code(),
            _ => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
