use thiserror::Error;

/// Errors raised while decoding a graph snapshot.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SnapshotError {
    #[error("snapshot too short for header ({0} bytes)")]
    ShortHeader(usize),
    #[error("bad magic {0:?}, expected \"ERGX\"")]
    BadMagic([u8; 4]),
    #[error("unsupported snapshot version {0}")]
    UnsupportedVersion(u8),
    #[error("vertex count {0} outside 1..=65536")]
    BadVertexCount(u32),
    #[error("payload length {found} does not match expected {expected} bytes")]
    PayloadLength { expected: usize, found: usize },
    #[error("nonzero padding bit after the last edge")]
    NonzeroPadding,
}

#[derive(Debug, Error)]
pub enum ErgmError {
    #[error("vertex count must be at least 1")]
    EmptyGraph,
    #[error("vertex {vertex} out of range for n = {n}")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("self-loop ({0}, {0}) is not a valid edge")]
    SelfLoop(usize),
    #[error("graph size mismatch: {left} vs {right}")]
    SizeMismatch { left: usize, right: usize },
    #[error("probability {0} outside [0, 1]")]
    InvalidProbability(f64),
    #[error("invalid template: {0}")]
    InvalidTemplate(String),
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("{what} requires n <= {max}, got {n}")]
    TooLarge { what: &'static str, n: usize, max: usize },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("fixed-point system has no qualifying solution: {0}")]
    FixedPoint(String),
    #[error("observer `{name}` failed at step {step}: {message}")]
    Observer { name: String, step: u64, message: String },
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Snapshot(#[from] SnapshotError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = ErgmError> = std::result::Result<T, E>;
