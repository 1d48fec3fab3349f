use thiserror::Error;

/// Errors raised by the algebra layer and the solver.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument violates a documented precondition (dimension, order, shape).
    #[error("invalid argument: {0}")]
    Argument(String),
    /// A matrix or value lies outside the set where the operation is defined.
    #[error("outside domain: {0}")]
    Domain(String),
    /// A numerical kernel failed to reach its tolerance.
    #[error("numeric failure: {0}")]
    Numeric(String),
    /// Two independent evaluation routes disagree beyond tolerance.
    #[error("cross-check failed: {0}")]
    CrossCheck(String),
    /// A problem description failed validation.
    #[error("config error: {0}")]
    Config(String),
    /// Policy iteration ran out of iterations.
    #[error("no convergence after {iterations} iterations (last residual {last_residual:e})")]
    NonConvergence {
        iterations: usize,
        last_residual: f64,
        residual_history: Vec<f64>,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
