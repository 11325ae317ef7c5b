use std::io;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum SernError {
    /// A model, region, grid or generation parameter is outside its valid range.
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// Stored data is inconsistent, e.g. an edge refers to a node that does not exist.
    #[error("integrity error: {0}")]
    Integrity(String),

    #[error("resource error: {0}")]
    Resource(String),

    /// A serialized graph could not be parsed.
    #[error("format error: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}

impl SernError {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        SernError::Parameter(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, SernError>;
