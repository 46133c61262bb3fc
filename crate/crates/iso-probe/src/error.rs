use thiserror::Error;

/// Errors reported by parsing, contract checks and the oracle guards.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed DIMACS input; `line` is 1-based.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// Two objects that must agree on vertex count do not.
    #[error("size mismatch: {0}")]
    SizeMismatch(String),

    /// A caller broke an operation's precondition.
    #[error("contract violation: {0}")]
    Contract(String),

    /// Invalid generator or solver parameters.
    #[error("parameter error: {0}")]
    Parameter(String),

    /// The brute-force oracle refuses inputs beyond its guards.
    #[error("oracle refusal: {0}")]
    OracleLimit(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }
}
