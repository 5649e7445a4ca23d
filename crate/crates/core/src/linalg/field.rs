use std::fmt::Debug;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::{BigQ, Rational};

/// Default ~30-bit primes for modular certificates. The third is a reserve
/// used only when the first two disagree with the exhibited kernel.
pub const PRIMES: [u64; 3] = [1_073_741_789, 1_073_741_783, 1_073_741_741];

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Scalar field used by the elimination engine.
pub trait Field: Send + Sync {
    type Elem: Clone + PartialEq + Send + Sync + Debug;
    /// Whether ranks computed in this field are ranks over ℚ.
    const EXACT: bool;

    fn name(&self) -> String;
    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    /// Multiplicative inverse; `a` must be nonzero.
    fn inv(&self, a: &Self::Elem) -> Self::Elem;
    fn from_rational(&self, q: &Rational) -> Result<Self::Elem>;
    fn from_big(&self, q: &BigQ) -> Result<Self::Elem>;

    /// `a − c·b`.
    fn mul_sub(&self, a: &Self::Elem, c: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.sub(a, &self.mul(c, b))
    }
}

/// ℤ/pℤ for a prime below 2³¹, so products fit in 64 bits.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PrimeField {
    pub p: u64,
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self> {
        if p >= 1 << 31 || !is_prime(p) {
            return Err(Error::InvalidArgument(format!("{p} is not a prime below 2^31")));
        }
        Ok(Self { p })
    }

    fn reduce_i64(&self, v: i64) -> u64 {
        v.rem_euclid(self.p as i64) as u64
    }

    fn reduce_big(&self, v: &BigInt) -> u64 {
        let p = BigInt::from(self.p);
        v.mod_floor(&p).to_u64().expect("residue fits")
    }

    pub fn pow(&self, mut b: u64, mut e: u64) -> u64 {
        let mut r = 1u64;
        b %= self.p;
        while e > 0 {
            if e & 1 == 1 {
                r = r * b % self.p;
            }
            b = b * b % self.p;
            e >>= 1;
        }
        r
    }
}

impl Field for PrimeField {
    type Elem = u64;
    const EXACT: bool = false;

    fn name(&self) -> String {
        format!("GF({})", self.p)
    }
    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1
    }
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
    fn add(&self, a: &u64, b: &u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }
    fn sub(&self, a: &u64, b: &u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        a * b % self.p
    }
    fn neg(&self, a: &u64) -> u64 {
        if *a == 0 {
            0
        } else {
            self.p - a
        }
    }
    fn inv(&self, a: &u64) -> u64 {
        assert!(*a != 0, "inverse of zero");
        self.pow(*a, self.p - 2)
    }
    fn from_rational(&self, q: &Rational) -> Result<u64> {
        let d = self.reduce_i64(*q.denom());
        if d == 0 {
            return Err(Error::BadPrime { prime: self.p, denominator: *q.denom() });
        }
        Ok(self.mul(&self.reduce_i64(*q.numer()), &self.inv(&d)))
    }
    fn from_big(&self, q: &BigQ) -> Result<u64> {
        let d = self.reduce_big(q.denom());
        if d == 0 {
            return Err(Error::BadPrime { prime: self.p, denominator: q.denom().to_i64().unwrap_or(i64::MAX) });
        }
        Ok(self.mul(&self.reduce_big(q.numer()), &self.inv(&d)))
    }
    fn mul_sub(&self, a: &u64, c: &u64, b: &u64) -> u64 {
        let cb = c * b % self.p;
        self.sub(a, &cb)
    }
}

/// ℚ with arbitrary-precision entries.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RationalField;

impl Field for RationalField {
    type Elem = BigQ;
    const EXACT: bool = true;

    fn name(&self) -> String {
        "Q".into()
    }
    fn zero(&self) -> BigQ {
        BigQ::zero()
    }
    fn one(&self) -> BigQ {
        BigQ::one()
    }
    fn is_zero(&self, a: &BigQ) -> bool {
        a.is_zero()
    }
    fn add(&self, a: &BigQ, b: &BigQ) -> BigQ {
        a + b
    }
    fn sub(&self, a: &BigQ, b: &BigQ) -> BigQ {
        a - b
    }
    fn mul(&self, a: &BigQ, b: &BigQ) -> BigQ {
        a * b
    }
    fn neg(&self, a: &BigQ) -> BigQ {
        -a
    }
    fn inv(&self, a: &BigQ) -> BigQ {
        assert!(!a.is_zero(), "inverse of zero");
        a.recip()
    }
    fn from_rational(&self, q: &Rational) -> Result<BigQ> {
        Ok(crate::to_big(q))
    }
    fn from_big(&self, q: &BigQ) -> Result<BigQ> {
        Ok(q.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat;

    #[test]
    fn default_primes_are_distinct_30_bit_primes() {
        for p in PRIMES {
            assert!(is_prime(p), "{p}");
            assert!(p > 1 << 29 && p < 1 << 30);
        }
        assert_ne!(PRIMES[0], PRIMES[1]);
        assert_ne!(PRIMES[1], PRIMES[2]);
    }

    #[test]
    fn prime_field_arithmetic() {
        let f = PrimeField::new(10007).unwrap();
        let a = f.from_rational(&rat(3, 7)).unwrap();
        assert_eq!(f.mul(&a, &7), 3);
        assert_eq!(f.add(&f.neg(&a), &a), 0);
        assert_eq!(f.mul(&f.inv(&a), &a), 1);
        assert_eq!(f.from_rational(&rat(-1, 1)).unwrap(), 10006);
        assert!(matches!(f.from_rational(&rat(1, 10007)), Err(Error::BadPrime { .. })));
        assert!(PrimeField::new(10005).is_err());
    }
}
