//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A resource budget refused the operation.
    #[error("budget exceeded for {what} (limit {limit}{})",
        actual.map(|a| format!(", needed {a}")).unwrap_or_default())]
    Budget {
        what: String,
        limit: u64,
        actual: Option<u64>,
    },

    /// theta of the empty set is undefined in both modes.
    #[error("theta of the empty set is undefined")]
    EmptyTheta,

    /// A relation failed an equivalence law.
    #[error("not an equivalence relation: {0}")]
    NotEquivalence(String),

    /// A term did not decode as the shape an operation requires.
    #[error("term does not decode as {expected}: {term}")]
    BadShape { expected: &'static str, term: String },

    /// A family is missing a value for an index.
    #[error("family has no value at index {0}")]
    MissingIndex(String),

    /// Matrix composition with disagreeing inner dimensions.
    #[error("inner dimensions disagree: {p_rows}x{p_cols} then {q_rows}x{q_cols}")]
    Dimension {
        p_rows: usize,
        p_cols: usize,
        q_rows: usize,
        q_cols: usize,
    },

    /// Malformed category or well-powering presentation data.
    #[error("invalid presentation: {0}")]
    Presentation(String),

    /// Command or term syntax error, with a byte offset where known.
    #[error("parse error at offset {at}: {msg}")]
    Parse { at: usize, msg: String },

    /// A name with no binding in the session.
    #[error("unknown binding: {0}")]
    UnknownBinding(String),

    /// Command usage error (bad flags, wrong arity).
    #[error("usage: {0}")]
    Usage(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
