//! The orthonormal σ-basis of J₃(𝕆), with coefficients in ℚ(√2, √3).

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};
use serde::Serialize;

use super::{j3o::DIAGONAL, AlgebraSpec};
use crate::error::{Error, Result};
use crate::{rat, Rational};

/// `a + b√2 + c√3 + d√6` with rational `a, b, c, d`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Q23 {
    pub a: Rational,
    pub b: Rational,
    pub c: Rational,
    pub d: Rational,
}

impl Q23 {
    pub const fn new(a: Rational, b: Rational, c: Rational, d: Rational) -> Self {
        Self { a, b, c, d }
    }

    pub fn from_rational(a: Rational) -> Self {
        Self { a, ..Self::default() }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::from_rational(Rational::one())
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero() && self.c.is_zero() && self.d.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero() && self.c.is_zero() && self.d.is_zero()
    }

    pub fn scale(&self, s: Rational) -> Self {
        Self { a: self.a * s, b: self.b * s, c: self.c * s, d: self.d * s }
    }

    pub fn to_f64(&self) -> f64 {
        use num_traits::ToPrimitive;
        let f = |q: Rational| q.to_f64().unwrap_or(f64::NAN);
        f(self.a) + f(self.b) * 2f64.sqrt() + f(self.c) * 3f64.sqrt() + f(self.d) * 6f64.sqrt()
    }
}

impl Add for Q23 {
    type Output = Self;
    fn add(self, r: Self) -> Self {
        Self { a: self.a + r.a, b: self.b + r.b, c: self.c + r.c, d: self.d + r.d }
    }
}

impl Sub for Q23 {
    type Output = Self;
    fn sub(self, r: Self) -> Self {
        self + (-r)
    }
}

impl Neg for Q23 {
    type Output = Self;
    fn neg(self) -> Self {
        Self { a: -self.a, b: -self.b, c: -self.c, d: -self.d }
    }
}

impl Mul for Q23 {
    type Output = Self;
    fn mul(self, r: Self) -> Self {
        let two = Rational::from_integer(2);
        let three = Rational::from_integer(3);
        let six = Rational::from_integer(6);
        let (a, b, c, d) = (self.a, self.b, self.c, self.d);
        let (p, q, s, t) = (r.a, r.b, r.c, r.d);
        Self {
            a: a * p + two * b * q + three * c * s + six * d * t,
            b: a * q + b * p + three * c * t + three * d * s,
            c: a * s + c * p + two * b * t + two * d * q,
            d: a * t + d * p + b * s + c * q,
        }
    }
}

impl fmt::Debug for Q23 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for Q23 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = [(self.a, ""), (self.b, "√2"), (self.c, "√3"), (self.d, "√6")]
            .iter()
            .filter(|(v, _)| !v.is_zero())
            .map(|(v, s)| format!("{v}{s}"))
            .collect();
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SigmaReport {
    pub sigma0_is_identity: bool,
    pub orthonormal: bool,
    pub traceless: bool,
    /// `σ^i ∘ σ^j − δ^{ij} σ⁰` has no σ⁰ component for all i, j ≥ 1.
    pub sigma0_component_clean: bool,
    /// Expanding each product back in the σ-basis reproduces it exactly.
    pub reconstruction_exact: bool,
    /// Nonzero `T^{ij}_k` in the σ-basis.
    pub structure_constant_count: usize,
    /// Distinct nonzero `T^{ij}_k` values, formatted.
    pub structure_constant_values: Vec<String>,
}

impl SigmaReport {
    pub fn pass(&self) -> bool {
        self.sigma0_is_identity && self.orthonormal && self.traceless && self.sigma0_component_clean && self.reconstruction_exact
    }
}

#[derive(Clone, Debug)]
pub struct SigmaBasis {
    /// `vectors[i]` holds the e-basis coordinates of `σ^i`; this is the
    /// change-of-basis matrix from σ- to e-coordinates, read column-wise.
    pub vectors: Vec<Vec<Q23>>,
    pub report: SigmaReport,
}

fn sqrt_3_2() -> Q23 {
    // √(3/2) = √6 / 2
    Q23::new(Rational::zero(), Rational::zero(), Rational::zero(), rat(1, 2))
}

fn inv_sqrt2() -> Q23 {
    Q23::new(Rational::zero(), rat(1, 2), Rational::zero(), Rational::zero())
}

fn sigma_vectors() -> Vec<Vec<Q23>> {
    let mut out = vec![vec![Q23::zero(); 27]; 27];
    let [d1, d10, d19] = DIAGONAL;
    for &d in &DIAGONAL {
        out[0][d] = Q23::one();
    }
    out[1][d1] = sqrt_3_2();
    out[1][d10] = -sqrt_3_2();
    out[2][d1] = inv_sqrt2();
    out[2][d10] = inv_sqrt2();
    out[2][d19] = inv_sqrt2().scale(Rational::from_integer(-2));
    // σ^{3..10} = √(3/2) e^{2..9}, σ^{11..18} = √(3/2) e^{11..18}, σ^{19..26} = √(3/2) e^{20..27}.
    for i in 3..=10 {
        out[i][i - 2] = sqrt_3_2();
    }
    for i in 11..=18 {
        out[i][i - 1] = sqrt_3_2();
    }
    for i in 19..=26 {
        out[i][i] = sqrt_3_2();
    }
    out
}

fn product_q(spec: &AlgebraSpec, x: &[Q23], y: &[Q23]) -> Vec<Q23> {
    let mut out = vec![Q23::zero(); spec.dim()];
    for (i, a) in x.iter().enumerate().filter(|(_, a)| !a.is_zero()) {
        for (j, b) in y.iter().enumerate().filter(|(_, b)| !b.is_zero()) {
            let ab = *a * *b;
            for (k, f) in spec.basis_product(i, j) {
                out[*k] = out[*k] + ab.scale(*f);
            }
        }
    }
    out
}

fn trace_q(x: &[Q23]) -> Q23 {
    DIAGONAL.iter().fold(Q23::zero(), |acc, &d| acc + x[d])
}

/// Build the σ-basis and verify its defining properties exactly.
pub fn sigma_basis(spec: &AlgebraSpec) -> Result<SigmaBasis> {
    if spec.dim() != 27 {
        return Err(Error::DimensionMismatch { expected: 27, got: spec.dim() });
    }
    let s = sigma_vectors();
    let third = rat(1, 3);
    let identity: Vec<Q23> = spec
        .identity()
        .ok_or_else(|| Error::InvalidAlgebra("J3(O) spec has no identity".into()))?
        .iter()
        .map(|q| Q23::from_rational(*q))
        .collect();
    let sigma0_is_identity = s[0] == identity;

    let mut orthonormal = true;
    let mut clean = true;
    let mut recon = true;
    let mut count = 0;
    let mut values = std::collections::BTreeSet::new();
    for i in 0..27 {
        for j in 0..27 {
            let p = product_q(spec, &s[i], &s[j]);
            let ip = trace_q(&p).scale(third);
            let want = if i == j { Q23::one() } else { Q23::zero() };
            if ip != want {
                orthonormal = false;
            }
            // Coefficient on σ^k is ⟨σ^k|p⟩ since the basis is orthonormal.
            let mut rebuilt = vec![Q23::zero(); 27];
            for k in 0..27 {
                let t = trace_q(&product_q(spec, &s[k], &p)).scale(third);
                if k == 0 && i >= 1 && j >= 1 && t != want {
                    clean = false;
                }
                if !t.is_zero() {
                    for (r, v) in rebuilt.iter_mut().zip(&s[k]) {
                        *r = *r + t * *v;
                    }
                    if k >= 1 {
                        count += 1;
                        values.insert(t.to_string());
                    }
                }
            }
            if rebuilt != p {
                recon = false;
            }
        }
    }
    let traceless = (1..27).all(|i| trace_q(&s[i]).is_zero()) && trace_q(&s[0]) == Q23::from_rational(Rational::from_integer(3));
    let report = SigmaReport {
        sigma0_is_identity,
        orthonormal,
        traceless,
        sigma0_component_clean: clean,
        reconstruction_exact: recon,
        structure_constant_count: count,
        structure_constant_values: values.into_iter().collect(),
    };
    Ok(SigmaBasis { vectors: s, report })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{build_j3o, real_line};

    #[test]
    fn field_arithmetic() {
        let r2 = Q23::new(Rational::zero(), Rational::one(), Rational::zero(), Rational::zero());
        let r3 = Q23::new(Rational::zero(), Rational::zero(), Rational::one(), Rational::zero());
        assert_eq!(r2 * r2, Q23::from_rational(Rational::from_integer(2)));
        assert_eq!((r2 * r3) * (r2 * r3), Q23::from_rational(Rational::from_integer(6)));
        let s = sqrt_3_2();
        assert_eq!(s * s, Q23::from_rational(rat(3, 2)));
        assert!(((r2 * r3).to_f64() - 6f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn sigma_basis_verifies() {
        let j = build_j3o();
        let sb = sigma_basis(&j).unwrap();
        assert!(sb.report.pass(), "{:?}", sb.report);
        assert!(sb.report.structure_constant_count > 0);
    }

    #[test]
    fn wrong_dimension_is_rejected() {
        assert!(sigma_basis(&real_line()).is_err());
    }
}
