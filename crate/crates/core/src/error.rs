use thiserror::Error;

pub type Result<T> = std::result::Result<T, MuntzError>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MuntzError {
    #[error("intervals [{0}] and [{1}] intersect")]
    OverlappingIntervals(String, String),

    #[error("degenerate interval [{lo}, {hi}]: need lo < hi")]
    DegenerateInterval { lo: String, hi: String },

    #[error("interval lower endpoint {0} is negative")]
    NegativeEndpoint(String),

    #[error("weight power {power} is not integrable on an interval touching 0")]
    NonintegrableWeight { power: String },

    #[error("weight coefficient {0} must be positive")]
    NonpositiveWeight(String),

    #[error("malformed number {0:?}")]
    MalformedNumber(String),

    #[error("exponents must be strictly increasing (position {index})")]
    NonIncreasing { index: usize },

    #[error("exponent {value} at position {index} is not positive")]
    NonPositive { index: usize, value: String },

    #[error("invalid exponent generator: {0}")]
    InvalidGenerator(String),

    #[error("condition estimate {cond} exceeds the guard at the maximum precision of {bits} bits")]
    PrecisionExhausted { bits: u32, cond: String },

    #[error("Gram matrix factorization failed at pivot {pivot} with {bits} bits")]
    NotPositiveDefinite { pivot: usize, bits: u32 },

    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("epsilon {epsilon} must lie strictly between 0 and r_w = {r_w}")]
    BadEpsilon { epsilon: String, r_w: String },

    #[error("residual squared {0} is negative beyond round-off; precision lost")]
    NegativeResidualSquared(String),

    #[error("evaluation point {x} outside [0, {radius})")]
    OutsideRadius { x: String, radius: String },

    #[error("eigenvalue list has a repeated value at positions {0} and {1}")]
    DuplicateEigenvalue(usize, usize),

    #[error("eigenvalue at position {0} is zero")]
    ZeroEigenvalue(usize),

    #[error("|u_{index}| exceeds rho^lambda")]
    BoundViolation { index: usize },

    #[error("length mismatch: expected at most {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("bad partition: {0}")]
    BadPartition(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl MuntzError {
    /// Stable identifier used in machine-readable reports.
    pub fn kind(&self) -> &'static str {
        use MuntzError::*;
        match self {
            OverlappingIntervals(..) => "OverlappingIntervals",
            DegenerateInterval { .. } => "DegenerateInterval",
            NegativeEndpoint(_) => "NegativeEndpoint",
            NonintegrableWeight { .. } => "NonintegrableWeight",
            NonpositiveWeight(_) => "NonpositiveWeight",
            MalformedNumber(_) => "MalformedNumber",
            NonIncreasing { .. } => "NonIncreasing",
            NonPositive { .. } => "NonPositive",
            InvalidGenerator(_) => "InvalidGenerator",
            PrecisionExhausted { .. } => "PrecisionExhausted",
            NotPositiveDefinite { .. } => "NotPositiveDefinite",
            IndexOutOfRange { .. } => "IndexOutOfRange",
            BadEpsilon { .. } => "BadEpsilon",
            NegativeResidualSquared(_) => "NegativeResidualSquared",
            OutsideRadius { .. } => "OutsideRadius",
            DuplicateEigenvalue(..) => "DuplicateEigenvalue",
            ZeroEigenvalue(_) => "ZeroEigenvalue",
            BoundViolation { .. } => "BoundViolation",
            LengthMismatch { .. } => "LengthMismatch",
            BadPartition(_) => "BadPartition",
            InvalidArgument(_) => "InvalidArgument",
        }
    }

    /// True for failures caused by finite precision rather than bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            MuntzError::PrecisionExhausted { .. }
                | MuntzError::NotPositiveDefinite { .. }
                | MuntzError::NegativeResidualSquared(_)
        )
    }
}
