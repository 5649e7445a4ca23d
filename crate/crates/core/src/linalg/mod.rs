//! Exact sparse linear algebra over ℚ and prime fields.

mod certificate;
mod closure;
mod echelon;
mod field;
mod sparse;

pub use certificate::{
    certify_kernel, kernel_mod_p, solve_kernel, solve_kernel_certified, KernelCertificate, ModKernel, SolveOptions,
    SparseBigVec,
};
pub use closure::{is_closed, rank_of_span, rank_of_span_mod_p, span_closure, span_closure_in, ClosureResult};
pub use echelon::Echelon;
pub use field::{is_prime, Field, PrimeField, RationalField, PRIMES};
pub use sparse::{primitive_row, Component, RowDeduper, SparseMatrix};

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::operator::LinearOperator;
use crate::{to_big, BigQ};

/// Pivots `d_k` of the exact factorisation `A = L·diag(d)·Lᵀ` of a symmetric
/// matrix, without pivoting. All pivots positive ⇔ positive definite. Stops
/// after the first zero pivot.
pub fn ldlt_pivots(a: &LinearOperator) -> Result<Vec<BigQ>> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch { expected: a.rows, got: a.cols });
    }
    let n = a.rows;
    let mut m: Vec<Vec<BigQ>> = (0..n).map(|i| (0..n).map(|j| to_big(&a.get(i, j))).collect()).collect();
    for i in 0..n {
        for j in 0..i {
            if m[i][j] != m[j][i] {
                return Err(Error::InvalidArgument("matrix is not symmetric".into()));
            }
        }
    }
    let mut pivots = Vec::with_capacity(n);
    for k in 0..n {
        let d = m[k][k].clone();
        pivots.push(d.clone());
        if d.is_zero() {
            break;
        }
        for i in k + 1..n {
            if m[i][k].is_zero() {
                continue;
            }
            let l = &m[i][k] / &d;
            for j in k + 1..n {
                if !m[k][j].is_zero() {
                    let t = &l * &m[k][j];
                    m[i][j] -= t;
                }
            }
        }
    }
    Ok(pivots)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::int;
    use num_traits::Signed;
    use proptest::prelude::*;

    #[test]
    fn ldlt_detects_definiteness() {
        let pd = LinearOperator::from_dense(2, 2, &[int(2), int(1), int(1), int(2)]);
        assert!(ldlt_pivots(&pd).unwrap().iter().all(|p| p.is_positive()));
        let indef = LinearOperator::from_dense(2, 2, &[int(1), int(2), int(2), int(1)]);
        assert!(!ldlt_pivots(&indef).unwrap().iter().all(|p| p.is_positive()));
    }

    // Dense Gaussian elimination over ℚ as an oracle.
    fn dense_rank(rows: &[Vec<i64>], cols: usize) -> usize {
        let mut m: Vec<Vec<BigQ>> = rows.iter().map(|r| r.iter().map(|v| to_big(&int(*v))).collect()).collect();
        let mut rank = 0;
        for c in 0..cols {
            let Some(p) = (rank..m.len()).find(|&r| !m[r][c].is_zero()) else { continue };
            m.swap(rank, p);
            for r in 0..m.len() {
                if r != rank && !m[r][c].is_zero() {
                    let f = &m[r][c] / &m[rank][c];
                    for k in 0..cols {
                        let t = &f * &m[rank][k];
                        m[r][k] -= t;
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn modular_rank_bounded_by_rational_rank(
            rows in proptest::collection::vec(proptest::collection::vec(-3i64..=3, 5), 1..7),
            p in prop_oneof![Just(2u64), Just(3), Just(5), Just(10007), Just(PRIMES[0])],
        ) {
            let m = SparseMatrix::from_int_rows(5, &rows);
            let rq = dense_rank(&rows, 5);
            let rp = kernel_mod_p(&m, p).unwrap().rank;
            prop_assert!(rp <= rq);
            let cert = solve_kernel(&m, &[], &SolveOptions::default()).unwrap();
            prop_assert!(cert.conclusive);
            prop_assert_eq!(cert.kernel_dim(), 5 - rq);
            for v in &cert.kernel_basis {
                prop_assert!(m.first_violation(v).unwrap().is_none());
            }
        }
    }
}
