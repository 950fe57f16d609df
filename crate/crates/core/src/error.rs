use thiserror::Error;

/// Errors raised by the workbench.
#[derive(Debug, Error)]
pub enum Error {
    /// Two relations/functions do not share the carriers an operation needs.
    #[error("carrier mismatch: {0}")]
    CarrierMismatch(String),

    /// A finite object would exceed the configured cardinality bound.
    #[error("resource bound exceeded: cardinality {cardinality} > bound {bound}")]
    SizeBound { cardinality: u128, bound: u128 },

    /// A search gave up after exhausting its budget.
    #[error("search budget exhausted: {0}")]
    Budget(String),

    /// Textual input could not be parsed.
    #[error("parse error at offset {offset}: {message}")]
    Parse { offset: usize, message: String },

    /// A value, relation or spec violates an invariant of its type.
    #[error("invalid input: {0}")]
    Invalid(String),

    /// The relator kind does not fit the functor it is attached to.
    #[error("incompatible relator: {0}")]
    Incompatible(String),

    /// A construction whose result is guaranteed by theory failed verification.
    #[error("internal verification failed: {0}")]
    Verification(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn parse(offset: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            offset,
            message: message.into(),
        }
    }

    pub(crate) fn invalid(message: impl Into<String>) -> Self {
        Error::Invalid(message.into())
    }
}
