//! Exact octonion arithmetic.
//!
//! Basis `θ₀..θ₇` with `θ₀` the identity. The multiplication table below is
//! the output of Cayley–Dickson doubling ℝ → ℂ → ℍ → 𝕆 with the rule
//! `(a, b)(c, d) = (ac − d̄b, da + bc̄)`; the product of two basis units is
//! always `±θ_{i ⊕ j}`. The unit tests regenerate it from the doubling rule.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::Rational;

/// `MUL_SIGN[i][j]` is the sign of `θᵢ θⱼ = ±θ_{i⊕j}`.
pub const MUL_SIGN: [[i8; 8]; 8] = [
    [1, 1, 1, 1, 1, 1, 1, 1],
    [1, -1, 1, -1, 1, -1, -1, 1],
    [1, -1, -1, 1, 1, 1, -1, -1],
    [1, 1, -1, -1, 1, -1, 1, -1],
    [1, -1, -1, -1, -1, 1, 1, 1],
    [1, 1, -1, 1, -1, -1, -1, 1],
    [1, 1, 1, -1, -1, 1, -1, -1],
    [1, -1, 1, 1, -1, -1, 1, -1],
];

/// Product of two basis units as `(sign, index)`.
#[inline]
pub fn unit_product(i: usize, j: usize) -> (i8, usize) {
    (MUL_SIGN[i][j], i ^ j)
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Octonion {
    pub coeffs: [Rational; 8],
}

impl Octonion {
    pub fn new(coeffs: [Rational; 8]) -> Self {
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: [Rational::zero(); 8] }
    }

    pub fn one() -> Self {
        Self::unit(0)
    }

    /// The basis unit `θᵢ`.
    pub fn unit(i: usize) -> Self {
        assert!(i < 8, "octonion unit index out of range: {i}");
        let mut o = Self::zero();
        o.coeffs[i] = Rational::one();
        o
    }

    pub fn from_ints(c: [i64; 8]) -> Self {
        Self { coeffs: c.map(Rational::from_integer) }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn conj(&self) -> Self {
        let mut out = self.coeffs.map(|c| -c);
        out[0] = self.coeffs[0];
        Self { coeffs: out }
    }

    /// Squared Euclidean norm; equals the θ₀ coefficient of `x·conj(x)`.
    pub fn norm2(&self) -> Rational {
        self.coeffs.iter().map(|c| c * c).sum()
    }

    /// Real part (θ₀ coefficient).
    pub fn re(&self) -> Rational {
        self.coeffs[0]
    }

    pub fn scale(&self, s: Rational) -> Self {
        Self { coeffs: self.coeffs.map(|c| c * s) }
    }

    /// `(xy)z − x(yz)`.
    pub fn associator(x: &Self, y: &Self, z: &Self) -> Self {
        (*x * *y) * *z - *x * (*y * *z)
    }
}

impl Add for Octonion {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let mut c = self.coeffs;
        for (a, b) in c.iter_mut().zip(rhs.coeffs) {
            *a += b;
        }
        Self { coeffs: c }
    }
}

impl Sub for Octonion {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        let mut c = self.coeffs;
        for (a, b) in c.iter_mut().zip(rhs.coeffs) {
            *a -= b;
        }
        Self { coeffs: c }
    }
}

impl Neg for Octonion {
    type Output = Self;
    fn neg(self) -> Self {
        Self { coeffs: self.coeffs.map(|c| -c) }
    }
}

impl Mul for Octonion {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let mut out = [Rational::zero(); 8];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                let (s, k) = unit_product(i, j);
                let t = a * b;
                if s > 0 {
                    out[k] += t;
                } else {
                    out[k] -= t;
                }
            }
        }
        Self { coeffs: out }
    }
}

impl fmt::Debug for Octonion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            write!(f, "({c})θ{i}")?;
            first = false;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    // Cayley–Dickson doubling on coefficient slices of length 2^k.
    fn cd_conj(x: &[Rational]) -> Vec<Rational> {
        let mut v = x.to_vec();
        for c in v.iter_mut().skip(1) {
            *c = -*c;
        }
        v
    }

    fn cd_mul(x: &[Rational], y: &[Rational]) -> Vec<Rational> {
        let n = x.len();
        if n == 1 {
            return vec![x[0] * y[0]];
        }
        let h = n / 2;
        let (a, b) = x.split_at(h);
        let (c, d) = y.split_at(h);
        let ac = cd_mul(a, c);
        let db = cd_mul(&cd_conj(d), b);
        let da = cd_mul(d, a);
        let bc = cd_mul(b, &cd_conj(c));
        let mut out: Vec<Rational> = ac.iter().zip(&db).map(|(p, q)| p - q).collect();
        out.extend(da.iter().zip(&bc).map(|(p, q)| p + q));
        out
    }

    fn small_rational() -> impl Strategy<Value = Rational> {
        (-12i64..=12, 1i64..=6).prop_map(|(n, d)| Rational::new(n, d))
    }

    fn octonion() -> impl Strategy<Value = Octonion> {
        proptest::array::uniform8(small_rational()).prop_map(Octonion::new)
    }

    #[test]
    fn table_matches_doubling() {
        for i in 0..8 {
            for j in 0..8 {
                let want = cd_mul(&Octonion::unit(i).coeffs, &Octonion::unit(j).coeffs);
                let got = Octonion::unit(i) * Octonion::unit(j);
                assert_eq!(got.coeffs.to_vec(), want, "θ{i}·θ{j}");
            }
        }
    }

    #[test]
    fn basic_examples() {
        assert_eq!(Octonion::unit(0) * Octonion::unit(3), Octonion::unit(3));
        assert_eq!(Octonion::unit(5) * Octonion::unit(5), -Octonion::one());
        let (t1, t2, t4) = (Octonion::unit(1), Octonion::unit(2), Octonion::unit(4));
        let lhs = cd_mul(&cd_mul(&t1.coeffs, &t2.coeffs), &t4.coeffs);
        let rhs = cd_mul(&t1.coeffs, &cd_mul(&t2.coeffs, &t4.coeffs));
        assert_ne!(lhs, rhs);
        assert_eq!((t1 * t2) * t4, -(t1 * (t2 * t4)));
        assert!(!Octonion::associator(&t1, &t2, &t4).is_zero());
        assert_ne!(t1 * t2, t2 * t1);
    }

    #[test]
    fn conjugation_examples() {
        assert_eq!(Octonion::one().conj(), Octonion::one());
        assert_eq!(Octonion::unit(4).conj(), -Octonion::unit(4));
        let x = Octonion::from_ints([2, 3, 0, 0, 0, 0, 0, 0]);
        assert_eq!(x.conj(), Octonion::from_ints([2, -3, 0, 0, 0, 0, 0, 0]));
    }

    #[test]
    fn norm_examples() {
        assert_eq!(Octonion::one().norm2(), Rational::one());
        assert_eq!((Octonion::unit(1) + Octonion::unit(2)).norm2(), Rational::from_integer(2));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn norm_is_multiplicative(x in octonion(), y in octonion()) {
            let xy = cd_mul(&x.coeffs, &y.coeffs);
            let brute: Rational = xy.iter().map(|c| c * c).sum();
            prop_assert_eq!((x * y).norm2(), brute);
            prop_assert_eq!((x * y).norm2(), x.norm2() * y.norm2());
        }

        #[test]
        fn alternative_laws(x in octonion(), y in octonion()) {
            prop_assert_eq!((x * x) * y, x * (x * y));
            prop_assert_eq!((y * x) * x, y * (x * x));
        }

        #[test]
        fn conjugation_is_an_anti_involution(x in octonion(), y in octonion()) {
            prop_assert_eq!(x.conj().conj(), x);
            prop_assert_eq!((x * y).conj(), y.conj() * x.conj());
            prop_assert_eq!((x * x.conj()).re(), x.norm2());
        }
    }
}
