//! Exact computational machinery for nonassociative spectral geometry over
//! the exceptional Jordan algebra J₃(𝕆).
//!
//! Everything that determines a dimension or a kernel is computed over ℚ or
//! certified through ℤ/p ranks; floating point appears only in the Connes
//! distance optimisation.

pub mod algebra;
pub mod cli;
pub mod derivations;
pub mod distance;
pub mod error;
pub mod linalg;
pub mod modules;
pub mod octonion;
pub mod operator;
pub mod report;
pub mod triple;

pub use error::{Error, Result};

/// Scalar type for algebra data and operators.
pub type Rational = num_rational::Rational64;

/// Arbitrary-precision rational used inside exact elimination.
pub type BigQ = num_rational::BigRational;

/// Convert a small rational to an arbitrary-precision one.
pub fn to_big(q: &Rational) -> BigQ {
    BigQ::new((*q.numer()).into(), (*q.denom()).into())
}

/// Convert back when the value fits in 64 bits.
pub fn from_big(q: &BigQ) -> Option<Rational> {
    use num_traits::ToPrimitive;
    Some(Rational::new(q.numer().to_i64()?, q.denom().to_i64()?))
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(n, d)
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(n)
}
