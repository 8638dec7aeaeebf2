//! Error type shared by every module.

use crate::prob::Axis;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("unknown axis {0:?}")]
    UnknownAxis(Axis),

    #[error("axis {0:?} appears more than once")]
    DuplicateAxis(Axis),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("negative probability {value} at cell {cell:?}")]
    NegativeProbability { cell: Vec<usize>, value: f64 },

    #[error("probabilities sum to {0}, expected 1")]
    NotNormalized(f64),

    #[error("divergence is infinite: cell {cell:?} has mass under the first law but none under the second")]
    InfiniteDivergence { cell: Vec<usize> },

    #[error("axis sets overlap: {0}")]
    Overlap(String),

    #[error("infeasible marginal constraints: {0}")]
    Infeasible(String),

    #[error("iterative scaling did not converge after {iterations} sweeps (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("certificate failed: {0}")]
    Certificate(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("wrong detection mode: {0}")]
    WrongMode(String),

    #[error("invalid input: {0}")]
    Input(String),

    #[error("resource budget exceeded: {0}")]
    Resource(String),
}

pub type Result<T> = std::result::Result<T, Error>;
