use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument is outside the domain of a scalar map.
    #[error("domain error in {op}: {detail}")]
    Domain { op: &'static str, detail: String },

    /// Model or clock parameters violate a construction constraint.
    #[error("invalid {model} parameters: {constraint}")]
    InvalidParameter {
        model: &'static str,
        constraint: String,
    },

    /// A cgf was evaluated with real part outside its open strip.
    #[error("Re(u) = {re} lies outside the analyticity strip ({lower}, {upper})")]
    StripViolation { re: f64, lower: f64, upper: f64 },

    /// A clock cgf was evaluated at or beyond its explosion point.
    #[error("clock cgf explodes: v = {v} is not below the explosion point {explosion}")]
    Explosion { v: f64, explosion: f64 },

    #[error("{what}: no sign change found on [{lo}, {hi}]")]
    RootBracketing { what: String, lo: f64, hi: f64 },

    #[error("{what}: root finder did not converge after {iterations} iterations")]
    RootNonConvergence { what: String, iterations: usize },

    #[error("quadrature did not converge: achieved error {achieved:e}, target {target:e}")]
    QuadratureNonConvergence { achieved: f64, target: f64 },

    /// A price violates a static no-arbitrage bound, so no implied volatility exists.
    #[error("price {price} violates the {bound} bound {value} at k = {k}")]
    ArbitrageBound {
        k: f64,
        price: f64,
        bound: &'static str,
        value: f64,
    },

    #[error("{op} needs at least {needed} samples, got {got}")]
    InsufficientSamples {
        op: &'static str,
        needed: usize,
        got: usize,
    },

    #[error("{0}")]
    NotApplicable(String),
}

impl Error {
    pub(crate) fn domain(op: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain {
            op,
            detail: detail.into(),
        }
    }

    pub(crate) fn param(model: &'static str, constraint: impl Into<String>) -> Self {
        Error::InvalidParameter {
            model,
            constraint: constraint.into(),
        }
    }
}
