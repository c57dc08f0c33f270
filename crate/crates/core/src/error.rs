//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum SpoError {
    #[error("dimension mismatch in {context}: expected {expected}, got {actual}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        actual: usize,
    },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("oracle failed on sample {index}: {source}")]
    SampleFailure {
        index: usize,
        #[source]
        source: Box<SpoError>,
    },

    #[error("simplex exceeded the pivot limit of {0}")]
    IterationLimit(usize),

    #[error("barrier line search stalled after {attempts} backtracking steps")]
    BarrierDivergence {
        attempts: usize,
        last_iterate: Vec<f64>,
    },

    #[error("normal equations are rank deficient; retry with lambda > 0")]
    RankDeficient,

    #[error("unsupported operation: {0}")]
    Unsupported(String),

    #[error("internal consistency violation: {0}")]
    InternalConsistency(String),

    #[error("degenerate denominator: |total optimal cost| = {0} is below 1e-6")]
    DegenerateDenominator(f64),

    #[error("training diverged at iteration {iteration}: iterate norm {norm}")]
    Divergence { iteration: usize, norm: f64 },

    #[error("training failed at lambda = {lambda}: {source}")]
    TrainingAtLambda {
        lambda: f64,
        #[source]
        source: Box<SpoError>,
    },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, SpoError>;
