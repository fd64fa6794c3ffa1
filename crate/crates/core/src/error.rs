use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("vector too short: length {len}, need at least {min}")]
    TooShort { len: usize, min: usize },

    #[error("coordinate {index} = {value:e} is below the positivity floor")]
    NonPositive { index: usize, value: f64 },

    #[error("coordinates sum to {sum}, expected 1")]
    NotNormalized { sum: f64 },

    #[error("coordinates sum to {sum:e}, expected 0")]
    NotZeroSum { sum: f64 },

    #[error("non-finite value in input")]
    NonFinite,

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),

    #[error("graph is disconnected: no path from node {from} to node {to}")]
    Disconnected { from: usize, to: usize },

    #[error("node {0} has no neighbors")]
    IsolatedNode(usize),

    #[error("failed to draw a connected graph in {attempts} attempts")]
    ConnectivityNotAchieved { attempts: usize },

    #[error("row {row} of the similarity matrix has no mass off the diagonal")]
    DegenerateSimilarity { row: usize },

    #[error("similarity q[{i}][{j}] underflowed to zero where the target is positive")]
    KlOverflow { i: usize, j: usize },

    #[error("optimization diverged at epoch {epoch} (lr = {lr:e}, loss = {loss:e})")]
    Divergence { epoch: usize, lr: f64, loss: f64 },

    #[error("all {trials} search trials diverged")]
    AllTrialsDiverged { trials: usize },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: {msg}")]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            line,
            msg: msg.into(),
        }
    }
}
