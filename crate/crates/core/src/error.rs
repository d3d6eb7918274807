use thiserror::Error;

/// Errors surfaced by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("degenerate configuration: affine dimension {dim} < {expected}")]
    Degenerate { dim: usize, expected: usize },

    #[error("integer overflow in exact arithmetic")]
    Overflow,

    #[error("lifting produced a non-generic lower hull after {attempts} attempts")]
    LiftingDegenerate { attempts: usize },

    #[error("matrix has rank {rank}, need {needed}")]
    RankDeficient { rank: usize, needed: usize },

    #[error("stratum {stratum:?} is not covered by a simplicial cone: {reason}")]
    RankDrop { stratum: Vec<usize>, reason: String },

    #[error("stratum {stratum:?} lies in the base locus")]
    InBaseLocus { stratum: Vec<usize> },

    #[error("negative exponent {exponent:?} after homogenization of equation {equation}")]
    NegativeExponent { equation: usize, exponent: Vec<i64> },

    #[error("coordinate {index} is zero")]
    ZeroCoordinate { index: usize },

    #[error("slice matrix is rank deficient")]
    RankDeficientSlice,

    #[error("expected {expected} start solutions, got {got}")]
    StartCountMismatch { expected: usize, got: usize },

    #[error("start system construction failed: {0}")]
    CellTrackFailed(String),

    #[error("no new representative found after {loops} monodromy loops")]
    NoNewRepresentative { loops: usize },

    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
