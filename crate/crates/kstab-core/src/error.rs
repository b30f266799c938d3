use thiserror::Error;

/// Errors surfaced by the exact kernel and the invariant layers above it.
#[derive(Debug, Error)]
pub enum KstabError {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("ambient dimension {0} exceeds the supported cap of 4")]
    DimensionCap(usize),

    #[error("degenerate polytope: {0}")]
    Degenerate(String),

    #[error("lattice point enumeration exceeded the cap of {cap} points")]
    LatticeCapExceeded { cap: usize },

    #[error("piecewise-linear data is not convex: {0}")]
    NonConvex(String),

    #[error("objective is unbounded below; properness is violated")]
    UnboundedObjective,

    #[error("linear program is infeasible")]
    Infeasible,

    #[error("non-rational input rejected: {0}")]
    NonRational(String),

    #[error("internal consistency check failed: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, KstabError>;
