use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the function.
    #[error("{what}: argument {value} is outside the domain")]
    Domain { what: &'static str, value: f64 },

    /// A series, continued fraction or iteration failed to reach the requested accuracy.
    #[error("{routine} did not converge after {iterations} iterations")]
    NoConvergence {
        routine: &'static str,
        iterations: usize,
    },

    /// No finite root could be bracketed, e.g. the tail is bounded or `n` is too small.
    #[error("root not bracketed: {0}")]
    RootNotBracketed(String),

    /// An operation was applied to a model or regime it does not support.
    #[error("model mismatch: {0}")]
    ModelMismatch(String),

    /// Invalid model parameters or configuration.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The requested work exceeds the configured budget.
    #[error("resource budget exceeded: {0}")]
    Resource(String),

    /// Data that cannot support the requested estimate, e.g. a constant series.
    #[error("degenerate data: {0}")]
    Degenerate(String),

    /// Malformed input data.
    #[error("data error at line {line}: {message}")]
    Data { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
