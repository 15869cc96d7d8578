use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("invalid depth {0}: plane distance must be positive")]
    InvalidDepth(f64),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("frame {frame}: {msg}")]
    Frame { frame: String, msg: String },

    #[error("non-finite loss or gradient")]
    NonFinite,

    #[error("probe on coordinate {coord} failed: {source}")]
    Probe {
        coord: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("aborted at epoch {epoch}: {failed} of {total} frames failed")]
    Aborted {
        epoch: usize,
        failed: usize,
        total: usize,
    },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
