use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    /// A computation needed data beyond the configured weight/level caps.
    #[error("truncation exceeded: {0}")]
    Truncation(String),

    #[error("vector is not in the ambient span")]
    NotInAmbient,

    #[error("hypothesis violated for {id}: {reason}")]
    Hypothesis { id: String, reason: String },

    #[error("quotient is not stable: {0}")]
    Unstable(String),

    #[error("invalid module: {0}")]
    InvalidModule(String),

    #[error("invalid structure table: {0}")]
    InvalidTable(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
