//! The Albert algebra J₃(𝕆) in the e-basis.
//!
//! Internal index `m − 1` stores the basis element `e^m` (m = 1..27):
//! `e^1, e^10, e^19` are the diagonal idempotents, `e^{i+2}` carries `θᵢ` at
//! (2,3), `e^{i+11}` carries `θᵢ` at (3,1), and `e^{i+20}` carries `θᵢ` at
//! (1,2); the transposed slot holds the conjugate.

use std::collections::BTreeSet;

use num_traits::{One, Zero};

use super::{AlgebraSpec, Flag};
use crate::error::{Error, Result};
use crate::octonion::Octonion;
use crate::operator::LinearOperator;
use crate::{rat, Rational};

/// Internal indices of `e^1, e^10, e^19`.
pub const DIAGONAL: [usize; 3] = [0, 9, 18];

/// Internal index of the one-based label `e^m`.
pub fn j3o_index(m: usize) -> usize {
    assert!((1..=27).contains(&m), "e-basis label out of range: {m}");
    m - 1
}

/// Off-diagonal slot `(row, col)` holding `θᵢ` for each block, and the block's first index.
const OFF_BLOCKS: [((usize, usize), usize); 3] = [((1, 2), 1), ((2, 0), 10), ((0, 1), 19)];

/// 3×3 Hermitian octonionic matrix model.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MatrixModel {
    pub m: [[Octonion; 3]; 3],
}

impl MatrixModel {
    pub fn zero() -> Self {
        Self { m: [[Octonion::zero(); 3]; 3] }
    }

    pub fn from_element(a: &[Rational]) -> Result<Self> {
        if a.len() != 27 {
            return Err(Error::DimensionMismatch { expected: 27, got: a.len() });
        }
        let mut out = Self::zero();
        for (slot, &idx) in DIAGONAL.iter().enumerate() {
            out.m[slot][slot] = Octonion::one().scale(a[idx]);
        }
        for &((r, c), base) in &OFF_BLOCKS {
            let mut o = Octonion::zero();
            for i in 0..8 {
                o.coeffs[i] = a[base + i];
            }
            out.m[r][c] = o;
            out.m[c][r] = o.conj();
        }
        Ok(out)
    }

    /// Coordinates in the e-basis; fails if the matrix is not Hermitian with real diagonal.
    pub fn to_element(&self) -> Result<Vec<Rational>> {
        let mut a = vec![Rational::zero(); 27];
        for (slot, &idx) in DIAGONAL.iter().enumerate() {
            let d = self.m[slot][slot];
            if d.coeffs[1..].iter().any(|c| !c.is_zero()) {
                return Err(Error::InvalidArgument("diagonal entry is not real".into()));
            }
            a[idx] = d.coeffs[0];
        }
        for &((r, c), base) in &OFF_BLOCKS {
            if self.m[c][r] != self.m[r][c].conj() {
                return Err(Error::InvalidArgument("matrix is not Hermitian".into()));
            }
            a[base..base + 8].copy_from_slice(&self.m[r][c].coeffs);
        }
        Ok(a)
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        let mut out = Self::zero();
        for i in 0..3 {
            for j in 0..3 {
                let mut acc = Octonion::zero();
                for k in 0..3 {
                    acc = acc + self.m[i][k] * rhs.m[k][j];
                }
                out.m[i][j] = acc;
            }
        }
        out
    }

    /// `½(ab + ba)`.
    pub fn jordan(&self, rhs: &Self) -> Self {
        let ab = self.matmul(rhs);
        let ba = rhs.matmul(self);
        let mut out = Self::zero();
        for i in 0..3 {
            for j in 0..3 {
                out.m[i][j] = (ab.m[i][j] + ba.m[i][j]).scale(rat(1, 2));
            }
        }
        out
    }
}

fn basis_names() -> Vec<String> {
    (1..=27).map(|m| format!("e{m}")).collect()
}

/// J₃(𝕆) with structure constants generated from the matrix model.
pub fn build_j3o() -> AlgebraSpec {
    let unit = |i: usize| {
        let mut v = vec![Rational::zero(); 27];
        v[i] = Rational::one();
        MatrixModel::from_element(&v).expect("length 27")
    };
    let mats: Vec<MatrixModel> = (0..27).map(unit).collect();
    let mut trip = Vec::new();
    for i in 0..27 {
        for j in 0..27 {
            let p = mats[i].jordan(&mats[j]).to_element().expect("Jordan product of Hermitian matrices is Hermitian");
            for (k, v) in p.into_iter().enumerate() {
                if !v.is_zero() {
                    trip.push((i, j, k, v));
                }
            }
        }
    }
    let mut identity = vec![Rational::zero(); 27];
    for &d in &DIAGONAL {
        identity[d] = Rational::one();
    }
    let flags: BTreeSet<Flag> = [Flag::Commutative, Flag::Unital].into_iter().collect();
    AlgebraSpec::new(27, basis_names(), Some(identity), flags, trip).expect("J3(O) construction is valid")
}

/// Sum of the three diagonal entries of the matrix model.
pub fn jordan_trace(a: &[Rational]) -> Result<Rational> {
    if a.len() != 27 {
        return Err(Error::DimensionMismatch { expected: 27, got: a.len() });
    }
    Ok(DIAGONAL.iter().map(|&d| a[d]).sum())
}

/// Gram matrix of `⟨a|b⟩ = (1/3)·Tr[a∘b]` on the e-basis.
pub fn j3o_gram(spec: &AlgebraSpec) -> Result<LinearOperator> {
    if spec.dim() != 27 {
        return Err(Error::DimensionMismatch { expected: 27, got: spec.dim() });
    }
    let mut trip = Vec::new();
    for i in 0..27 {
        for j in 0..27 {
            let t: Rational = spec
                .basis_product(i, j)
                .iter()
                .filter(|(k, _)| DIAGONAL.contains(k))
                .map(|(_, v)| *v)
                .sum();
            if !t.is_zero() {
                trip.push((i, j, t * rat(1, 3)));
            }
        }
    }
    Ok(LinearOperator::from_triplets(27, 27, trip))
}

/// `e^1, e^10, e^19` (unit normalisation).
pub fn primitive_idempotents_standard() -> [Vec<Rational>; 3] {
    DIAGONAL.map(|d| {
        let mut v = vec![Rational::zero(); 27];
        v[d] = Rational::one();
        v
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::IdentityKind;
    use crate::int;
    use proptest::prelude::*;

    fn e(m: usize) -> Vec<Rational> {
        let mut v = vec![Rational::zero(); 27];
        v[j3o_index(m)] = Rational::one();
        v
    }

    fn add(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
        a.iter().zip(b).map(|(x, y)| x + y).collect()
    }

    // Independent route: multiply via the matrix model directly.
    fn model_product(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
        let ma = MatrixModel::from_element(a).unwrap();
        let mb = MatrixModel::from_element(b).unwrap();
        ma.jordan(&mb).to_element().unwrap()
    }

    #[test]
    fn dimension_and_identity() {
        let j = build_j3o();
        assert_eq!(j.dim(), 27);
        let e0 = add(&add(&e(1), &e(10)), &e(19));
        assert_eq!(j.identity().unwrap(), e0.as_slice());
        assert_eq!(j.identity_index(), None);
        for i in 0..27 {
            assert_eq!(j.product(&e0, &j.basis(i)).unwrap(), j.basis(i));
        }
    }

    #[test]
    fn diagonal_idempotents() {
        let j = build_j3o();
        assert_eq!(j.product(&e(1), &e(1)).unwrap(), e(1));
        assert_eq!(j.product(&e(1), &e(10)).unwrap(), j.zero());
        assert_eq!(model_product(&e(1), &e(10)), j.zero());
    }

    #[test]
    fn commutative_and_sparse() {
        let j = build_j3o();
        assert!(j.check_identity(IdentityKind::Commutative).pass);
        let vals = j.constant_values();
        let expected: BTreeSet<Rational> = [int(1), rat(1, 2), rat(-1, 2)].into_iter().collect();
        assert_eq!(vals, expected);
    }

    #[test]
    fn not_associative_with_witness() {
        let j = build_j3o();
        let r = j.check_identity(IdentityKind::Associative);
        assert!(!r.pass);
        assert!(!r.witnesses.is_empty());
        let (a, b, c) = j.first_nonassociative_triple().unwrap();
        let assoc = j.associator(&j.basis(a), &j.basis(b), &j.basis(c)).unwrap();
        assert_ne!(assoc, j.zero());
    }

    #[test]
    fn identity_associates() {
        let j = build_j3o();
        let e0 = j.identity().unwrap().to_vec();
        for b in 0..27 {
            for c in 0..27 {
                assert_eq!(j.associator(&e0, &j.basis(b), &j.basis(c)).unwrap(), j.zero());
            }
        }
    }

    #[test]
    fn traces() {
        assert_eq!(jordan_trace(&build_j3o().identity().unwrap().to_vec()).unwrap(), int(3));
        assert_eq!(jordan_trace(&e(1)).unwrap(), int(1));
        assert_eq!(jordan_trace(&e(3)).unwrap(), int(0));
    }

    #[test]
    fn gram_is_diagonal_positive_definite() {
        let j = build_j3o();
        let g = j3o_gram(&j).unwrap();
        for i in 0..27 {
            for k in 0..27 {
                let want = if i != k {
                    int(0)
                } else if DIAGONAL.contains(&i) {
                    rat(1, 3)
                } else {
                    rat(2, 3)
                };
                assert_eq!(g.get(i, k), want);
            }
        }
        let pivots = crate::linalg::ldlt_pivots(&g).unwrap();
        assert!(pivots.iter().all(num_traits::Signed::is_positive));
    }

    #[test]
    fn idempotents() {
        let j = build_j3o();
        let p = primitive_idempotents_standard();
        for a in 0..3 {
            assert_eq!(j.product(&p[a], &p[a]).unwrap(), p[a]);
            assert_eq!(jordan_trace(&p[a]).unwrap(), int(1));
            for b in 0..3 {
                if a != b {
                    assert_eq!(j.product(&p[a], &p[b]).unwrap(), j.zero());
                }
            }
        }
        let sum = add(&add(&p[0], &p[1]), &p[2]);
        assert_eq!(sum, j.identity().unwrap());
    }

    fn element() -> impl Strategy<Value = Vec<Rational>> {
        proptest::collection::vec((-6i64..=6, 1i64..=3).prop_map(|(n, d)| rat(n, d)), 27)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn table_agrees_with_matrix_model(a in element(), b in element()) {
            let j = build_j3o();
            prop_assert_eq!(j.product(&a, &b).unwrap(), model_product(&a, &b));
        }

        #[test]
        fn trace_of_left_multiplication(a in element()) {
            let j = build_j3o();
            let s = j.left_mult_operator(&a).unwrap();
            prop_assert_eq!(s.trace(), jordan_trace(&a).unwrap() * int(9));
        }

        #[test]
        fn left_multiplication_is_linear(a in element(), b in element(), x in -4i64..=4, y in -4i64..=4) {
            let j = build_j3o();
            let comb: Vec<Rational> = a.iter().zip(&b).map(|(p, q)| p * int(x) + q * int(y)).collect();
            let lhs = j.left_mult_operator(&comb).unwrap();
            let rhs = j.left_mult_operator(&a).unwrap().lincomb(int(x), &j.left_mult_operator(&b).unwrap(), int(y)).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn cube_associates(a in element()) {
            let j = build_j3o();
            prop_assert_eq!(j.associator(&a, &a, &a).unwrap(), j.zero());
        }
    }
}
