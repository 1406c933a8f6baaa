use std::path::PathBuf;

use thiserror::Error;

/// Errors produced anywhere in the collapse pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("total out-degree weight of the network is zero")]
    ZeroTotalWeight,
    #[error("off-diagonal entries have zero variance; pair correlation undefined")]
    DegenerateVariance,
    #[error("invalid specification: {0}")]
    InvalidSpec(String),
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("malformed incidence data at line {line}: {reason}")]
    MalformedFile { line: usize, reason: String },
    #[error("incidence data contains no network")]
    EmptyNetwork,
    #[error("network has {species} species, at or above the size cap of {cap}")]
    SizeCapExceeded { species: usize, cap: usize },
    #[error("state became non-finite at node {node}")]
    NonFiniteState { node: usize },
    #[error("interaction matrix is singular")]
    SingularMatrix,
    #[error("function returned a non-finite value at x = {at}")]
    NonFiniteSample { at: f64 },
    #[error("fixed-point residual is identically zero")]
    DegeneratePolynomial,
    #[error("reduced map has no real fixed point")]
    NoManifoldSolution,
    #[error("closed-form prediction has a zero denominator")]
    ZeroDenominator,
    #[error("result table is empty")]
    EmptyTable,
    #[error("config error: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
