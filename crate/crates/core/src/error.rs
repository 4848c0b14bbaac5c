use thiserror::Error;

/// Errors raised by the simulation and bound routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum LabError {
    #[error("invalid dimension {0}: need at least 2 basis states")]
    InvalidDimension(usize),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("marked element {marked} out of range for search space of size {n}")]
    MarkedOutOfRange { marked: usize, n: usize },

    #[error("state is not normalized (norm^2 = {0})")]
    NotNormalized(f64),

    #[error("probability {p} outside the admissible range [{lo}, {hi}]")]
    ProbabilityOutOfRange { p: f64, lo: f64, hi: f64 },

    #[error("argument {x} outside the domain of the improvement function for t = {t}")]
    ImprovementDomain { x: f64, t: usize },

    #[error("trace shape mismatch: {0}")]
    TraceShape(String),

    #[error("composite dimension {n}^{s} exceeds the cap of {cap} amplitudes")]
    CapExceeded { n: usize, s: usize, cap: usize },

    #[error("{s} engines do not evenly partition a search space of size {n}")]
    UnevenPartition { n: usize, s: usize },

    #[error("target probability {target} is not reachable on {size} elements (best {best})")]
    Unreachable { target: f64, size: usize, best: f64 },

    #[error("invalid measurement scheme: {0}")]
    InvalidScheme(String),

    #[error("root finding failed: {0}")]
    Bracket(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),
}

pub type Result<T> = std::result::Result<T, LabError>;
