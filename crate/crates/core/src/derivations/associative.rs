//! Universal 1-forms over small associative algebras, as an oracle for the
//! exceptional computations.

use num_traits::Zero;
use serde::Serialize;

use super::{assemble_leibniz_system_for, leibniz_violation};
use crate::algebra::{diagonal_algebra, matrix_algebra_2x2, AlgebraSpec};
use crate::error::{Error, Result};
use crate::linalg::{solve_kernel_certified, span_closure, SolveOptions, SparseMatrix};
use crate::modules::ModuleAction;
use crate::operator::{accumulate, sparse_from_dense, LinearOperator, SparseVec};
use crate::{int, Rational};

#[derive(Clone, Debug, Serialize)]
pub struct AssociativeCase {
    pub algebra: String,
    pub dim: usize,
    /// `dim ker(m: A⊗A → A)`.
    pub ker_m_dim: usize,
    /// Dimension of the left module generated by `{eⁱ⊗1 − 1⊗eⁱ}`.
    pub generated_dim: usize,
    pub generated_inside_ker_m: bool,
    pub delta_is_derivation: bool,
    /// `φ(h⊗k) = hu ⊗ vk` commutes with both actions.
    pub phi_is_bimodule_hom: bool,
    pub delta_phi_is_derivation: bool,
    /// Derivations `A → A⊗A`.
    pub derivation_kernel_dim: usize,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct AssociativeOracleReport {
    pub cases: Vec<AssociativeCase>,
    pub pass: bool,
}

fn run_case(name: &str, alg: &AlgebraSpec, u: &[Rational]) -> Result<AssociativeCase> {
    let n = alg.dim();
    let e0 = alg.identity().ok_or_else(|| Error::InvalidArgument("unital algebra required".into()))?.to_vec();
    let id = LinearOperator::identity(n);
    let lm = alg.left_mult_basis();
    let rm = alg.right_mult_basis();
    let left = ModuleAction::new(alg.clone(), n * n, lm.iter().map(|l| l.kron(&id)).collect())?;
    let right = ModuleAction::new(alg.clone(), n * n, rm.iter().map(|r| id.kron(r)).collect())?;

    // m(eʰ⊗eᵏ) = eʰeᵏ
    let mut mmat = SparseMatrix::new(n * n);
    let mut rows: Vec<Vec<(usize, Rational)>> = vec![Vec::new(); n];
    for h in 0..n {
        for k in 0..n {
            for (c, x) in alg.basis_product(h, k) {
                rows[*c].push((h * n + k, *x));
            }
        }
    }
    for r in rows {
        mmat.push_row(r);
    }
    let ker = solve_kernel_certified(&mmat, &[], &SolveOptions { exact_limit: usize::MAX, ..SolveOptions::default() })?;

    let tensor = |a: &[Rational], b: &[Rational]| -> SparseVec {
        accumulate((0..n).flat_map(|h| (0..n).map(move |k| (h * n + k, a[h] * b[k]))))
    };
    let delta: Vec<SparseVec> = (0..n)
        .map(|i| {
            let ei = alg.basis(i);
            let mut v = tensor(&ei, &e0);
            v.extend(tensor(&e0, &ei).into_iter().map(|(c, x)| (c, -x)));
            accumulate(v)
        })
        .collect();
    let gen = span_closure(n * n, &delta, left.basis_ops())?;
    let inside = gen.basis.iter().all(|v| {
        let dense: Vec<(usize, crate::BigQ)> = v.iter().map(|(c, x)| (*c, crate::to_big(x))).collect();
        matches!(mmat.first_violation(&dense), Ok(None))
    });
    let delta_ok = leibniz_violation(&left, &right, &delta)?.is_none();

    let phi = alg.right_mult_operator(u)?.kron(&alg.left_mult_operator(u)?);
    let hom_ok = (0..n).all(|a| {
        phi.compose(left.basis_op(a)).ok() == left.basis_op(a).compose(&phi).ok()
            && phi.compose(right.basis_op(a)).ok() == right.basis_op(a).compose(&phi).ok()
    });
    let pt = phi.transpose();
    let delta_phi: Vec<SparseVec> =
        delta.iter().map(|v| LinearOperator::apply_sparse_with_transpose(&pt, v)).collect();
    let delta_phi_ok = leibniz_violation(&left, &right, &delta_phi)?.is_none() && delta_phi.iter().any(|v| !v.is_empty());

    let system = assemble_leibniz_system_for(&left, &right)?;
    let der = solve_kernel_certified(&system.matrix, &[], &SolveOptions { exact_limit: usize::MAX, ..SolveOptions::default() })?;

    let ker_m_dim = ker.kernel_dim();
    let pass = gen.dim == ker_m_dim && inside && delta_ok && hom_ok && delta_phi_ok && der.conclusive && der.kernel_dim() > 1;
    Ok(AssociativeCase {
        algebra: name.into(),
        dim: n,
        ker_m_dim,
        generated_dim: gen.dim,
        generated_inside_ker_m: inside,
        delta_is_derivation: delta_ok,
        phi_is_bimodule_hom: hom_ok,
        delta_phi_is_derivation: delta_phi_ok,
        derivation_kernel_dim: der.kernel_dim(),
        pass,
    })
}

/// ℝ² and 2×2 real matrices, with `u = v` a fixed invertible element.
pub fn associative_oracle_suite() -> Result<AssociativeOracleReport> {
    let cases = vec![
        run_case("R^2", &diagonal_algebra(2), &[int(1), int(2)])?,
        run_case("M2(R)", &matrix_algebra_2x2(), &[int(1), int(2), int(3), int(4)])?,
    ];
    let pass = cases.iter().all(|c| c.pass);
    Ok(AssociativeOracleReport { cases, pass })
}

/// `a⊗1 − 1⊗a` for an arbitrary element.
pub fn universal_delta(alg: &AlgebraSpec, a: &[Rational]) -> Result<SparseVec> {
    let n = alg.dim();
    let e0 = alg.identity().ok_or_else(|| Error::InvalidArgument("unital algebra required".into()))?;
    let sa = sparse_from_dense(a);
    let s0 = sparse_from_dense(e0);
    let mut v = Vec::new();
    for (h, x) in &sa {
        for (k, y) in &s0 {
            v.push((h * n + k, x * y));
        }
    }
    for (h, x) in &s0 {
        for (k, y) in &sa {
            v.push((h * n + k, -(x * y)));
        }
    }
    Ok(accumulate(v.into_iter().filter(|(_, x): &(usize, Rational)| !x.is_zero())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_passes() {
        let r = associative_oracle_suite().unwrap();
        assert!(r.pass, "{r:?}");
        assert_eq!(r.cases[0].ker_m_dim, 2);
        assert_eq!(r.cases[0].derivation_kernel_dim, 2);
        assert_eq!(r.cases[1].ker_m_dim, 12);
    }

    #[test]
    fn delta_of_first_idempotent() {
        let a = diagonal_algebra(2);
        let d = universal_delta(&a, &[int(1), int(0)]).unwrap();
        // (1,0)⊗(1,1) − (1,1)⊗(1,0) = d0⊗d1 − d1⊗d0
        assert_eq!(d, vec![(1, int(1)), (2, int(-1))]);
    }
}
