//! Exact multivariate polynomial arithmetic over the rationals.

mod monomial;
mod order;
mod poly;
pub mod text;

pub use monomial::{monomials_of_degree, monomials_up_to_degree, Monomial, MAX_VARS};
pub use order::{MonomialOrder, OrderKind};
pub use poly::{arith, ArithOp, Poly, Ring};
pub use text::{format_listing, parse_listing, parse_poly};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("ambient mismatch: {left} vs {right} variables")]
    AmbientMismatch { left: usize, right: usize },
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("variable `{0}` occurs but is not covered by the substitution")]
    Uncovered(String),
    #[error("substitution image for `{0}` is not affine-linear")]
    NotLinear(String),
    #[error("kept variable `{0}` also occurs in a substitution image")]
    VariableClash(String),
    #[error("parse error: {0}")]
    Parse(String),
}

/// Shorthand for an exact rational from a numerator/denominator pair.
pub fn q(n: i64, d: i64) -> num_rational::BigRational {
    num_rational::BigRational::new(n.into(), d.into())
}
