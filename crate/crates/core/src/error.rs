use thiserror::Error;

/// Errors raised by the core library. Indices in messages are 1-based.
#[derive(Error, Debug, Clone, PartialEq)]
pub enum Error {
    #[error("index {index} out of range 1..={n}")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("conflicting values for triple {triple:?}: {first} vs {second}")]
    ConflictingEntry {
        triple: [usize; 3],
        first: f64,
        second: f64,
    },
    #[error("duplicate entry for triple {triple:?}")]
    DuplicateEntry { triple: [usize; 3] },
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("unsupported dimension {0} (supported: 2..=12)")]
    UnsupportedDimension(usize),
    #[error("non-finite value {0}")]
    NonFinite(f64),
    #[error("sectional curvature needs two distinct indices, got ({0}, {0})")]
    EqualIndices(usize),
    #[error("frame is rank deficient (residual norm {residual:.3e} at row {row})")]
    RankDeficientFrame { row: usize, residual: f64 },
    #[error("inadmissible partition {blocks:?} for n = {n}: {reason}")]
    InadmissiblePartition {
        n: usize,
        blocks: Vec<usize>,
        reason: String,
    },
    #[error("{bound} not applicable: {reason}")]
    NotApplicable { bound: &'static str, reason: String },
    #[error("empty argument list")]
    EmptyList,
    #[error("block index {ell} out of range 1..={k}")]
    BadBlockIndex { ell: usize, k: usize },
    #[error("case mismatch: {0}")]
    CaseMismatch(String),
    #[error("invariant violation: {0}")]
    InvariantViolation(String),
    #[error("induced metric is singular or ill-conditioned (condition number {0:.3e})")]
    SingularMetric(f64),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("malformed input: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;
