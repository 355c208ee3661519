use num_complex::Complex64;
use thiserror::Error;

/// Errors raised by the evaluators and constructions in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("point {point} is not in the interior of {domain}")]
    NotInterior { point: Complex64, domain: String },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("coincident nodes")]
    CoincidentNodes,
    #[error("pole set is invalid: {0}")]
    InvalidPoleSet(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("no bracket found: {0}")]
    NoBracket(String),
    #[error("tail tolerance {requested:e} not reachable within {lifts} lifts (best {achieved:e})")]
    TailNotReached {
        requested: f64,
        achieved: f64,
        lifts: usize,
    },
    #[error("parameter-cap overflow: {0}")]
    CapOverflow(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;
