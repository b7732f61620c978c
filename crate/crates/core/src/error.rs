use std::io;

use thiserror::Error;

/// Errors raised while reading an edge list.
#[derive(Debug, Error)]
pub enum ParseError {
    #[error("line {line}: expected two vertex tokens, found {found}")]
    Malformed { line: usize, found: usize },
    #[error("line {line}: unrecognized update `{text}`")]
    BadUpdate { line: usize, text: String },
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Errors raised by graph and index lookups.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("vertex id {id} out of range (n = {n})")]
    OutOfRange { id: u64, n: usize },
    #[error("unknown vertex label `{0}`")]
    UnknownVertex(String),
    #[error("vertex label `{0}` already exists")]
    DuplicateVertex(String),
    #[error("query vertex {0} is not in the working set")]
    NotInSet(u32),
    #[error("index does not match graph: {0}")]
    IndexMismatch(String),
}

/// Errors raised when decoding a serialized index.
#[derive(Debug, Error)]
pub enum FormatError {
    #[error("bad magic bytes")]
    BadMagic,
    #[error("unsupported format version {0}")]
    UnsupportedVersion(u32),
    #[error("truncated stream")]
    Truncated,
    #[error("vertex {vertex} appears in more than one node of tree {k}")]
    VertexOverlap { k: usize, vertex: u32 },
    #[error("malformed index: {0}")]
    Malformed(String),
    #[error("i/o error: {0}")]
    Io(io::Error),
}

impl From<io::Error> for FormatError {
    fn from(err: io::Error) -> Self {
        if err.kind() == io::ErrorKind::UnexpectedEof {
            FormatError::Truncated
        } else {
            FormatError::Io(err)
        }
    }
}

impl FormatError {
    /// Stable numeric code for each failure class.
    pub fn code(&self) -> u32 {
        match self {
            FormatError::BadMagic => 1,
            FormatError::UnsupportedVersion(_) => 2,
            FormatError::Truncated => 3,
            FormatError::VertexOverlap { .. } => 4,
            FormatError::Malformed(_) => 5,
            FormatError::Io(_) => 6,
        }
    }
}
