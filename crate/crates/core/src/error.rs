use thiserror::Error;

/// Errors raised by the algebra, path and analysis routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("shape mismatch: ({0}) vs ({1})")]
    ShapeMismatch(String, String),

    #[error("invalid shape: {0}")]
    InvalidShape(String),

    #[error("exp requires a zero constant term")]
    NonzeroConstantTerm,

    #[error("log requires a unit constant term")]
    NonUnitConstantTerm,

    #[error("degree {degree} out of range for depth {depth}")]
    DegreeOutOfRange { degree: usize, depth: usize },

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("non-real dilation factor applied to a real tensor; complexify first")]
    NonRealDilation,

    #[error("path has no vertices")]
    EmptyPath,

    #[error("vertex {index} has dimension {found}, expected {expected}")]
    DimensionMismatch { index: usize, expected: usize, found: usize },

    #[error("mesh {0} does not subdivide each segment")]
    InvalidMesh(f64),

    #[error("shuffle size guard exceeded: m + n = {0} > {1}")]
    ShuffleGuard(usize, usize),

    #[error("empty set")]
    EmptySet,

    #[error("generators have gcd {0}, expected 1")]
    GcdNotOne(u64),

    #[error("invalid generator {0}: generators must be at least 2")]
    InvalidGenerator(u64),

    #[error("search bound {0} exceeds the guard of 1000000")]
    BoundGuard(u64),

    #[error("malformed bracket expression at byte {pos}: {msg}")]
    Bracket { pos: usize, msg: String },

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
