use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("line {line}: self-contact {node} -- {node} is not allowed")]
    SelfLoop { line: usize, node: u32 },

    #[error("{0}")]
    Domain(String),

    #[error("simplex not found in complex: {0}")]
    Lookup(String),

    #[error("{0}")]
    Usage(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
