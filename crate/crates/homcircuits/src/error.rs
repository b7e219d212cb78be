//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("missing value for variable `{0}`")]
    MissingVariable(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("size cap exceeded: {0}")]
    SizeCap(String),
    #[error("arity mismatch: {0}")]
    ArityMismatch(String),
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),
    #[error("parse error: {0}")]
    ParseError(String),
    #[error("invalid decomposition: {0}")]
    InvalidDecomposition(String),
    #[error("invalid elimination tree: {0}")]
    InvalidEliminationTree(String),
    #[error("invalid circuit: {0}")]
    InvalidCircuit(String),
    #[error("circuit is not symmetric")]
    NotSymmetric,
    #[error("circuit is not rigid")]
    NotRigid,
    #[error("minimal support of gate {0} is not unique")]
    UniquenessUnavailable(usize),
    #[error("no invertible evaluation matrix found after {0} attempts")]
    BasisNotFound(usize),
    #[error("patterns are not pairwise non-isomorphic ({0} and {1})")]
    NotPairwiseNonIsomorphic(usize, usize),
    #[error("pattern {0} has an isolated vertex")]
    IsolatedVertex(usize),
    #[error("coefficient of the requested term is zero")]
    ZeroCoefficient,
    #[error("invalid branch sets: {0}")]
    InvalidBranchSets(String),
    #[error("colour sets differ: {0}")]
    ColourMismatch(String),
    #[error("graph is not connected")]
    NotConnected,
    #[error("host is not square ({0}x{1})")]
    NotSquare(usize, usize),
    #[error("normalising constant vanished")]
    ZeroNormalizer,
    #[error("io error: {0}")]
    Io(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::ParseError(e.to_string())
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
