//! Error type shared by every module.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ZiError {
    /// Input violates a documented precondition.
    #[error("invalid input: {0}")]
    InvalidInput(String),
    /// Requested coefficient lies at or beyond the truncation order.
    #[error("exponent {exponent} is beyond truncation order {trunc}")]
    OutOfRange { exponent: String, trunc: String },
    /// Evaluation point is outside every validated regime.
    #[error("precision loss at {where_}: achieved error bound {bound:e}")]
    PrecisionLoss { where_: String, bound: f64 },
    /// Argument sits on (or numerically next to) a pole.
    #[error("pole at {at}: predicted residue {residue}")]
    Pole { at: String, residue: String },
    /// Requested region is not supported by any evaluator.
    #[error("unsupported region: {0}")]
    Unsupported(String),
    /// An internal consistency check failed.
    #[error("integrity failure: {0}")]
    Integrity(String),
    /// Quadrature could not reach the requested tolerance.
    #[error("tolerance {requested:e} not reached, achieved {achieved:e}")]
    Tolerance { requested: f64, achieved: f64 },
}

pub type Result<T> = std::result::Result<T, ZiError>;
