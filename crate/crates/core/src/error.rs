use alloc::string::String;

/// Errors raised across the crate.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("tensor extents must be positive, got {n}x{m}x{l}")]
    InvalidDims { n: usize, m: usize, l: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: String, found: String },

    #[error("probability {0} outside [0, 1]")]
    InvalidProbability(f64),

    #[error("rate {0} must lie in (0, 1]")]
    InvalidRate(f64),

    #[error("monotone plan entry {0} already agrees with the ground truth")]
    PlanEntryAgrees(usize),

    #[error("index {index} out of range for {len} entries")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("exact search needs {needed} (x, y) pairs, budget is {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },

    #[error("eager model would need {needed} rows, cap is {cap}")]
    RowCapExceeded { needed: u128, cap: u128 },

    #[error("malformed LP model: {0}")]
    MalformedModel(String),

    #[error("simplex iteration limit {0} reached")]
    IterationLimit(usize),

    #[error("basis matrix is numerically singular and could not be repaired")]
    SingularBasis,

    #[error("LP is {0}")]
    NotOptimal(&'static str),

    #[error("target point is not optimal: objective {target} vs optimum {optimum}")]
    TargetNotOptimal { target: f64, optimum: f64 },

    #[error("certificate precondition violated: {0}")]
    CertificatePrecondition(String),

    #[error("enumeration of 2^{0} points exceeds the supported size")]
    TooLarge(usize),

    #[error("inequality is not valid for the polytope")]
    InvalidInequality,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
