use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("integer overflow: {0}")]
    Overflow(String),
    #[error("point cloud would have {count} points, above the cap of {cap}")]
    TooManyPoints { count: usize, cap: usize },
    #[error("empty point set: {0}")]
    EmptySet(String),
    #[error("expected {expected} points, got {found}")]
    WrongPointCount { expected: usize, found: usize },
    #[error("model {0} is outside the analytic Robin catalog")]
    OutsideCatalog(String),
    #[error("linear program failed: {0}")]
    Lp(String),
    #[error("no convergence: relative gap {gap:.3e} above {tol:.3e} after {rounds} refinement rounds")]
    NotConverged { gap: f64, tol: f64, rounds: usize },
    #[error("Chebyshev constant vanishes at node {node} (theta = {theta:?}); the integral formula does not apply")]
    DegenerateNode { node: usize, theta: Vec<f64> },
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
