use std::fmt::Display;

use serde_json::{json, Value};
use thiserror::Error;

/// Everything the CLI can fail with. The two variants map to the two
/// non-zero exit codes.
#[derive(Debug, Error)]
pub enum Error {
    /// Unreadable file, malformed JSON or term, unresolvable name.
    #[error("{0}")]
    Parse(String),
    /// Well-formed input that breaks a law; `details` carries the witness.
    #[error("{message}")]
    Invalid { message: String, details: Value },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn parse(message: impl Display) -> Self {
        Error::Parse(message.to_string())
    }

    pub fn invalid(message: impl Display, details: Value) -> Self {
        Error::Invalid { message: message.to_string(), details }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse(_) => 2,
            Error::Invalid { .. } => 1,
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            Error::Parse(message) => json!({ "error": "parse", "message": message }),
            Error::Invalid { message, details } => {
                json!({ "error": "validation", "message": message, "details": details })
            }
        }
    }

    /// Prefixes the message with `context` (usually a file name).
    pub fn context(self, context: impl Display) -> Self {
        match self {
            Error::Parse(m) => Error::Parse(format!("{context}: {m}")),
            Error::Invalid { message, details } => Error::Invalid { message: format!("{context}: {message}"), details },
        }
    }
}
