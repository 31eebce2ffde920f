use std::fmt;

use thiserror::Error;

/// Position and offending token of a syntax error.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SyntaxError {
    pub line: usize,
    pub column: usize,
    pub token: String,
    pub message: String,
}

impl fmt::Display for SyntaxError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "syntax error at line {}, column {}: {} (at `{}`)",
            self.line, self.column, self.message, self.token
        )
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("{0}")]
    Syntax(SyntaxError),

    #[error("tensor degree error: {0}")]
    TensorDegree(String),

    #[error("hbar may not carry a negative exponent")]
    NegativeHbar,

    #[error("not invertible: {0}")]
    NotInvertible(String),

    #[error("algebra mismatch: {0}")]
    AlgebraMismatch(String),

    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    #[error("invalid rule: {0}")]
    InvalidRule(String),

    #[error("rewrite budget of {limit} rule applications exceeded")]
    BudgetExceeded { limit: usize },

    #[error("unknown preset `{0}`")]
    UnknownPreset(String),

    #[error("malformed JSON: {0}")]
    Json(String),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<SyntaxError> for Error {
    fn from(e: SyntaxError) -> Self {
        Error::Syntax(e)
    }
}
