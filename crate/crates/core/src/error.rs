use thiserror::Error;

/// Errors raised by the graph, walk and solver layers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("branching number must be at least 2, got {0}")]
    InvalidBranching(u32),
    #[error("label {label} is out of range for branching number {q}")]
    InvalidLabel { label: u32, q: u32 },
    #[error("label key {key} lies above the vertex level {level}")]
    LabelAboveLevel { key: i64, level: i64 },
    #[error("confluent with the reference end is undefined")]
    UndefinedConfluent,
    #[error("invalid vertex: {0}")]
    InvalidVertex(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("boundary configuration is on the {found} side, expected {expected}")]
    SideMismatch { expected: char, found: char },
    #[error("alpha must lie strictly between 0 and 1, got {0}")]
    AlphaOutOfRange(String),
    #[error("scaling function must be strictly positive, got {value} at {at}")]
    NonPositiveScaling { value: String, at: String },
    #[error("coefficient {0} is negative")]
    NegativeCoefficient(String),
    #[error("truncation has {size} vertices, cap is {cap}")]
    TruncationTooLarge { size: u128, cap: usize },
    #[error("linear system is singular")]
    Singular,
    #[error("function is not harmonic at {witness}")]
    NotHarmonic { witness: String },
    #[error("vertex {0} lies outside the truncation")]
    OutsideTruncation(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
