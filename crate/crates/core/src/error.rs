use thiserror::Error;

use crate::detection::Existence;

pub type Result<T> = std::result::Result<T, PelletError>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PelletError {
    #[error("polynomial has no coefficients")]
    EmptyPolynomial,

    #[error("leading coefficient is zero")]
    ZeroLeadingCoefficient,

    #[error("coefficient {index} is not finite")]
    NonFiniteCoefficient { index: usize },

    #[error("degree {degree} is below the minimum of {min}")]
    DegreeTooLow { degree: usize, min: usize },

    #[error("index k = {k} is outside 1..={max}")]
    IndexOutOfRange { k: usize, max: usize },

    #[error("coefficient a_{index} must be nonzero")]
    ZeroCoefficient { index: usize },

    #[error("auxiliary coefficient eta_{index} = {value} is invalid")]
    InvalidEta { index: usize, value: f64 },

    #[error("starting point {x} is not inside [r, R]: value {value} > 0")]
    InvalidStartingPoint { x: f64, value: f64 },

    #[error("quadratic discriminant {discriminant} is negative beyond rounding")]
    NegativeDiscriminant { discriminant: f64 },

    #[error("{stage}: no convergence after {iterations} iterations (bracket [{lo}, {hi}])")]
    IterationLimit {
        stage: &'static str,
        iterations: usize,
        lo: f64,
        hi: f64,
    },

    #[error("{stage}: iterate moved the wrong way ({from} -> {to})")]
    NonMonotone {
        stage: &'static str,
        from: f64,
        to: f64,
    },

    #[error("no sign change of phi on [{lo}, {hi}]")]
    NoSignChange { lo: f64, hi: f64 },

    #[error("no Pellet separation at k = {k} (verdict: {verdict:?})")]
    NoSeparation { k: usize, verdict: Existence },

    #[error("A_{index} not invertible")]
    SingularMatrix { index: usize },

    #[error("matrix shape mismatch: {0}")]
    Shape(String),

    #[error("root oracle did not converge after {sweeps} sweeps (residual {residual:e})")]
    OracleNotConverged { sweeps: usize, residual: f64 },

    #[error("invalid input: {0}")]
    Parse(String),
}

impl PelletError {
    /// True for failures of an iterative method, as opposed to rejected input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            PelletError::IterationLimit { .. }
                | PelletError::NonMonotone { .. }
                | PelletError::NegativeDiscriminant { .. }
                | PelletError::NoSignChange { .. }
                | PelletError::OracleNotConverged { .. }
                | PelletError::SingularMatrix { .. }
        )
    }
}
