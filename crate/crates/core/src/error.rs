use thiserror::Error;

/// Errors raised by tree construction, measure computation and the CLI.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("cycle detected")]
    CycleDetected,
    #[error("disconnected input: vertex {0} is not reachable from the root")]
    Disconnected(usize),
    #[error("root {0} is not a vertex of the tree")]
    RootAbsent(usize),
    #[error("vertex {vertex} out of range for a tree of order {n}")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("empty vertex set")]
    EmptySet,
    #[error("set is not connected")]
    NotConnected,
    #[error("tree of order {n} exceeds the configured cap of {cap}")]
    TooLarge { n: usize, cap: usize },
    #[error("{0} edges exceed the brute-force limit of {1}")]
    TooManyEdges(usize, usize),
    #[error("parameter out of range: {0}")]
    ParamOutOfRange(String),
    #[error("r_v must be strictly positive (vertex {0})")]
    ZeroResample(usize),
    #[error("invalid size: {0}")]
    InvalidSize(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("pole: {0}")]
    Pole(String),
    #[error("jet degree {0} exceeds the cap of {1}")]
    JetCap(u32, u32),
    #[error("negative intensity on atom {0:?}")]
    NegativeIntensity(Vec<usize>),
    #[error("insufficient expected counts after pooling")]
    InsufficientCounts,
    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
