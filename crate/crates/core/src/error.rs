use std::io;
use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the library. The CLI maps `Io` to a runtime failure and
/// every other variant to a usage/validation failure.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: self-loop on node '{node}'")]
    SelfLoop { line: usize, node: String },
    #[error("line {line}: weight must be strictly positive, got {weight}")]
    NonPositiveWeight { line: usize, weight: f64 },
    #[error("line {line}: duplicate edge {source_node} -> {target_node}")]
    DuplicateEdge {
        line: usize,
        source_node: String,
        target_node: String,
    },
    #[error("line {line}: duplicate link {a} -- {b}")]
    DuplicateLink { line: usize, a: String, b: String },
    #[error("invalid {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
    #[error("observed count {value} outside hypergeometric support [{low}, {high}]")]
    OutsideSupport { value: u64, low: u64, high: u64 },
    #[error("partitions share {0} nodes; at least 2 are required")]
    InsufficientOverlap(usize),
    #[error("adjusted Wallace index undefined: {0}")]
    UndefinedWallace(&'static str),
    #[error("network has no edges")]
    EmptyNetwork,
    #[error("node {0} has edges but no community label")]
    UncoveredNode(usize),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
