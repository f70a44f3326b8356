use std::io;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// An input violated an operation's precondition.
    #[error("domain error: {0}")]
    Domain(String),

    /// An enclosure could not be tightened enough to decide, even at the precision cap.
    #[error("precision exhausted at {bits} bits: {what}")]
    Precision { what: String, bits: u32 },

    /// A finite resource (continued fraction depth, step budget) ran out.
    #[error("resource exhausted: {0}")]
    Resource(String),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn precision(what: impl Into<String>, bits: u32) -> Self {
        Error::Precision {
            what: what.into(),
            bits,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
