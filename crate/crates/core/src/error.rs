use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed graph document: {0}")]
    MalformedDocument(String),

    #[error("duplicate node id `{0}`")]
    DuplicateNode(String),

    #[error("edge references undeclared node `{0}`")]
    DanglingEndpoint(String),

    #[error("unknown node `{0}`")]
    UnknownNode(String),

    #[error("malformed population table at line {line}: {reason}")]
    MalformedPopulation { line: usize, reason: String },

    #[error("graph is disconnected: no path from `{from}` to `{to}`")]
    Disconnected { from: String, to: String },

    #[error("graph has no vertices")]
    EmptyGraph,

    #[error("cannot select {requested} nodes from a graph of {available}")]
    TooManySelections { requested: usize, available: usize },

    #[error("selection length {actual} does not match K_o + K_e = {expected}")]
    SplitMismatch { expected: usize, actual: usize },

    #[error("no publishers placed")]
    NoPublishers,

    #[error("no LDNS nodes placed")]
    NoLdns,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("trace set mixes parameters: {0}")]
    MixedTraces(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
