use thiserror::Error;

/// Errors produced anywhere in the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Root bracketing or refinement failed.
    #[error("solver error: {0}")]
    Solver(String),

    /// Invalid or incomplete configuration.
    #[error("configuration error: {0}")]
    Config(String),

    /// Adaptive integration could not proceed.
    #[error("integration error: {0}")]
    Integration(String),

    /// Non-linear fit did not converge.
    #[error("fit did not converge after {iterations} iterations (last cost {last_cost:e})")]
    NotConverged {
        iterations: usize,
        last_cost: f64,
        /// Parameter vector of the last accepted iterate.
        last_params: Vec<f64>,
        /// Cost after every accepted step.
        cost_trace: Vec<f64>,
    },

    /// Spearman correlation of a constant sequence.
    #[error("correlation undefined: {0}")]
    Undefined(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
