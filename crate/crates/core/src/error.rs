use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("index {index} out of range for a domain of size {n}")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("empty index set")]
    EmptySet,
    #[error("index sets overlap at element {0}")]
    Overlap(usize),
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("malformed merge at step {step}: {reason}")]
    MalformedMerge { step: usize, reason: String },
    #[error("instance of size {n} exceeds the cap {cap}")]
    OverCap { n: usize, cap: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("signature error: {0}")]
    Signature(String),
    #[error("decode failed: {0}")]
    Decode(String),
    #[error("not a regular semigrid")]
    NotSemigrid,
    #[error("unsupported scheme: {0}")]
    UnsupportedScheme(String),
    #[error("formula error: {0}")]
    Formula(String),
    #[error("budget of {0} steps exceeded")]
    BudgetExceeded(u64),
    #[error("grid error: {0}")]
    Grid(String),
    #[error("two inputs produced the same structure: {0}")]
    Collision(String),
}

pub type Result<T> = std::result::Result<T, Error>;
