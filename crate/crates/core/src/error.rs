use std::io;

/// Errors raised by the sequence toolkit.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid symbol {0}: expected -1, 0 or 1")]
    InvalidSymbol(i64),

    #[error("a sequence prefix must contain at least one term")]
    EmptySequence,

    #[error("length mismatch: left prefix has {left} terms, right prefix has {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("shift {shift} is out of range for a prefix of length {len}")]
    ShiftOutOfRange { shift: usize, len: usize },

    #[error("prefix too short: need {required} terms, have {available}")]
    PrefixTooShort { required: usize, available: usize },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("{what} budget exceeded: requested {requested}, limit {limit}")]
    BudgetExceeded {
        what: &'static str,
        requested: usize,
        limit: usize,
    },

    #[error("malformed prefix file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
