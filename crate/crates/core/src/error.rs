use thiserror::Error;

/// Errors raised by the geometry, statistics and I/O layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("duplicate input point: vertices {first} and {second} coincide")]
    Duplicate { first: usize, second: usize },

    #[error("index {index} out of range (length {len})")]
    Index { index: usize, len: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("vertex {0} lies on the convex hull; its flower is unbounded")]
    UnboundedFlower(usize),

    #[error("model build error: {0}")]
    ModelBuild(String),

    #[error("schema version mismatch: found {found:?}, expected {expected:?}")]
    Schema { found: String, expected: String },

    #[error("parse error at byte {offset}: {message}")]
    Parse { offset: usize, message: String },

    #[error("trial {index} failed: {source}")]
    Trial {
        index: u64,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
