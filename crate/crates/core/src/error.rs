//! Error type shared by every module.

/// Everything that can go wrong while constructing measures, families,
/// states, or running estimators.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("measure must contain at least one atom with positive weight")]
    EmptyMeasure,

    #[error("atom {index}: weight must be positive and finite (got {value})")]
    BadWeight { index: usize, value: f64 },

    #[error("atom {index}: position must be finite")]
    BadPosition { index: usize },

    #[error("ball radius must be positive and finite")]
    BadRadius,

    #[error("need at least two atoms for gap queries")]
    TooFewAtoms,

    #[error("level index must be at least 1")]
    ZeroLevel,

    #[error("level {level} outside spectrum of length {len}")]
    LevelOutOfRange { level: u64, len: usize },

    #[error("invalid eigenvalue family: {0}")]
    InvalidFamily(String),

    #[error("invalid bound state: {0}")]
    InvalidState(String),

    #[error("q must be positive, finite and different from 1")]
    BadQ,

    #[error("invalid scan request: {0}")]
    InvalidScan(String),

    #[error("tail not summable: 2*s*q = {value} must exceed 1")]
    TailNotSummable { value: f64 },

    #[error("no admissible (M1, M2) within the truncation; smallest achievable sigma is {achievable}")]
    SigmaInfeasible { achievable: f64 },

    #[error("basis rows are not orthonormal (gram deviation {deviation})")]
    BasisNotOrthonormal { deviation: f64 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid moment trace request: {0}")]
    InvalidTrace(String),
}

pub type Result<T> = std::result::Result<T, Error>;
