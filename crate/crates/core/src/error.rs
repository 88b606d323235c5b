use thiserror::Error;

/// Errors raised by the library and surfaced by the CLI.
#[derive(Debug, Error)]
pub enum Error {
    #[error("every table entry is zero")]
    AllZero,

    #[error("unknown variable `{0}`")]
    UnknownVariable(String),

    #[error("overlapping variable sets: {0}")]
    OverlappingSets(String),

    #[error("context {0} has zero probability mass")]
    ZeroContext(String),

    #[error("distribution is not strictly positive")]
    NotPositive,

    #[error("state space of {states} states exceeds the cap of {cap}")]
    CapExceeded { states: u128, cap: u128 },

    #[error("invalid schema: {0}")]
    InvalidSchema(String),

    #[error("invalid table: {0}")]
    InvalidTable(String),

    #[error("invalid feature: {0}")]
    InvalidFeature(String),

    #[error("bad context `{input}`: {reason}")]
    BadContext { input: String, reason: String },

    #[error("schema mismatch: {0}")]
    SchemaMismatch(String),

    #[error("precondition failed ({precondition}): {witness}")]
    PreconditionFailed {
        precondition: String,
        witness: String,
    },

    #[error("reduced model for context {context} is not graph-isomorph: {witness}")]
    NotGraphIsomorph { context: String, witness: String },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit status for the CLI: 1 for unmet preconditions or failed
    /// verification, 2 for malformed input.
    pub fn exit_code(&self) -> u8 {
        match self {
            Error::NotPositive
            | Error::ZeroContext(_)
            | Error::PreconditionFailed { .. }
            | Error::NotGraphIsomorph { .. } => 1,
            _ => 2,
        }
    }

    pub(crate) fn precondition(precondition: &str, witness: impl Into<String>) -> Self {
        Error::PreconditionFailed {
            precondition: precondition.to_string(),
            witness: witness.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
