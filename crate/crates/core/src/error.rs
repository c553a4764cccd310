use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("expected a {expected}-component field, got {found}")]
    ComponentMismatch { expected: usize, found: usize },

    #[error("invalid symbol: {0}")]
    InvalidSymbol(String),

    #[error("constraint violation in `{field}`: {detail}")]
    ConstraintViolation { field: String, detail: String },

    #[error("invalid parameter `{name}`: {detail}")]
    InvalidParameter { name: String, detail: String },

    #[error("lattice too large for direct convolution: {points} points per axis (limit {limit})")]
    CostGuard { points: usize, limit: usize },

    #[error("non-finite value encountered at t = {time}")]
    NonFinite { time: f64 },

    #[error("fit rejected: {0}")]
    Fit(String),

    #[error("quadrature did not converge: {0}")]
    Quadrature(String),

    #[error("resonances are not separated: {0}")]
    NotSeparated(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid_param(name: &str, detail: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name: name.to_string(),
        detail: detail.into(),
    }
}
