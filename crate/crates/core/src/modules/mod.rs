//! Jordan modules, split bimodules over ⊕ⁿJ₃(𝕆), and their homomorphisms.

mod axioms;
mod homs;
mod intop;
mod split;

use num_traits::Zero;

use crate::algebra::AlgebraSpec;
use crate::error::{Error, Result};
use crate::operator::LinearOperator;
use crate::{rat, Rational};

pub use axioms::{
    check_associative_rep, check_module_axioms, symmetrized_control, AssociativeRepReport, AxiomSweep, AxiomWitness,
    ModuleAxiomReport, SymmetrizedControlReport,
};
pub use homs::{
    classify_bimodule_homs, classify_homs_brute_force, classify_homs_factorized, classify_module_homs, hom_suite,
    regular_commutant_dim, BimoduleHom, HomClassification, HomSuiteCase, HomSuiteReport,
};
pub use split::{build_split_bimodule, build_split_bimodule_over, direct_power, CompatibilityReport, SectorDims, SplitBimodule};

/// A linear map `π: A → End(M)`, stored on the basis of `A`.
#[derive(Clone, Debug)]
pub struct ModuleAction {
    algebra: AlgebraSpec,
    module_dim: usize,
    ops: Vec<LinearOperator>,
}

impl ModuleAction {
    pub fn new(algebra: AlgebraSpec, module_dim: usize, ops: Vec<LinearOperator>) -> Result<Self> {
        if ops.len() != algebra.dim() {
            return Err(Error::DimensionMismatch { expected: algebra.dim(), got: ops.len() });
        }
        if module_dim == 0 {
            return Err(Error::EmptyModule);
        }
        for op in &ops {
            if op.rows != module_dim || op.cols != module_dim {
                return Err(Error::DimensionMismatch { expected: module_dim, got: op.rows.max(op.cols) });
            }
        }
        Ok(Self { algebra, module_dim, ops })
    }

    /// `a ↦ L_a` on the algebra itself.
    pub fn regular(algebra: &AlgebraSpec) -> Self {
        let ops = algebra.left_mult_basis();
        Self { algebra: algebra.clone(), module_dim: algebra.dim(), ops }
    }

    /// `a ↦ R_a` on the algebra itself.
    pub fn regular_right(algebra: &AlgebraSpec) -> Self {
        let ops = algebra.right_mult_basis();
        Self { algebra: algebra.clone(), module_dim: algebra.dim(), ops }
    }

    pub fn zero(algebra: &AlgebraSpec, module_dim: usize) -> Self {
        let ops = vec![LinearOperator::zeros(module_dim, module_dim); algebra.dim()];
        Self { algebra: algebra.clone(), module_dim, ops }
    }

    /// `a ↦ π(a) ⊗ id_p` on `M ⊗ ℝᵖ` (index `m·p + v`).
    pub fn with_multiplicity(&self, p: usize) -> Result<Self> {
        if p == 0 {
            return Err(Error::EmptyModule);
        }
        let id = LinearOperator::identity(p);
        let ops = self.ops.iter().map(|o| o.kron(&id)).collect();
        Ok(Self { algebra: self.algebra.clone(), module_dim: self.module_dim * p, ops })
    }

    /// `½(π₁ + π₂)`.
    pub fn symmetrized(&self, other: &ModuleAction) -> Result<Self> {
        if self.algebra != other.algebra || self.module_dim != other.module_dim {
            return Err(Error::Incompatible("actions on different algebras or modules".into()));
        }
        let h = rat(1, 2);
        let ops = self.ops.iter().zip(&other.ops).map(|(a, b)| a.lincomb(h, b, h)).collect::<Result<_>>()?;
        Ok(Self { algebra: self.algebra.clone(), module_dim: self.module_dim, ops })
    }

    pub fn algebra(&self) -> &AlgebraSpec {
        &self.algebra
    }

    pub fn module_dim(&self) -> usize {
        self.module_dim
    }

    pub fn basis_ops(&self) -> &[LinearOperator] {
        &self.ops
    }

    pub fn basis_op(&self, i: usize) -> &LinearOperator {
        &self.ops[i]
    }

    /// `π(a)` for an arbitrary element, by linearity.
    pub fn op(&self, a: &[Rational]) -> Result<LinearOperator> {
        if a.len() != self.algebra.dim() {
            return Err(Error::DimensionMismatch { expected: self.algebra.dim(), got: a.len() });
        }
        let mut acc = LinearOperator::zeros(self.module_dim, self.module_dim);
        for (i, x) in a.iter().enumerate() {
            if !x.is_zero() {
                acc = acc.lincomb(Rational::from_integer(1), &self.ops[i], *x)?;
            }
        }
        Ok(acc)
    }
}
