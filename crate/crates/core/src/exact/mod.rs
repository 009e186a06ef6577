//! Exact arithmetic: arbitrary-precision rationals, quadratic surds and
//! univariate polynomials over either.
//!
//! All values are immutable after construction and safe to share across
//! threads. No operation in this module ever falls back to floating point;
//! float conversions are explicit (`to_f64`, `to_dyadic`).

mod poly;
mod rational;
mod surd;

pub use poly::{Poly, RatPoly, Ring, SurdPoly};
pub use rational::{
    checked_div, dyadic_sqrt, is_perfect_square, rat, rat_i, rat_to_string, rational_from_str,
    Rational,
};
pub use surd::{Sign, Surd};

use thiserror::Error;

/// Errors raised by exact-arithmetic operations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExactError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("negative radicand {0}")]
    NegativeRadicand(String),
    #[error("incompatible radicands {0} and {1}")]
    MixedRadicands(String, String),
    #[error("expected a quadratic polynomial, found degree {0:?}")]
    NotQuadratic(Option<usize>),
    #[error("cannot parse rational from {0:?}")]
    Parse(String),
}
