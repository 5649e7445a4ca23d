//! Split bimodules `M = A ⊗ (⊕ V^{ij}) ⊗ A` over `⊕ⁿA`.

use std::collections::BTreeMap;

use num_traits::One;
use serde::Serialize;

use super::ModuleAction;
use crate::algebra::{build_j3o, AlgebraSpec};
use crate::error::{Error, Result};
use crate::operator::LinearOperator;
use crate::Rational;

/// `dim V^{ij}` keyed by 1-based factor labels `(i, j)`; missing keys are 0.
pub type SectorDims = BTreeMap<(usize, usize), usize>;

/// Module basis `h ⊗ v ⊗ k` with index `(h·dim V + v)·dim A + k`; `V` is
/// ordered by sector (lexicographic in `(i, j)`).
#[derive(Clone, Debug)]
pub struct SplitBimodule {
    base: AlgebraSpec,
    algebra: AlgebraSpec,
    n_points: usize,
    sector_dims: SectorDims,
    sectors: Vec<(usize, usize)>,
    left: ModuleAction,
    right: ModuleAction,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CompatibilityReport {
    pub pairs_checked: usize,
    pub violations: usize,
    pub first_violation: Option<(usize, usize)>,
}

/// `⊕ⁿ base`, with basis `e^{(a)i}` at index `(a − 1)·dim + i`.
pub fn direct_power(base: &AlgebraSpec, n: usize) -> Result<AlgebraSpec> {
    if n == 0 {
        return Err(Error::InvalidArgument("number of points must be at least 1".into()));
    }
    if n == 1 {
        return Ok(base.clone());
    }
    let d = base.dim();
    let names = (1..=n).flat_map(|a| base.basis_names().iter().map(move |s| format!("{s}({a})"))).collect();
    let identity = base.identity().map(|e| e.iter().copied().cycle().take(n * d).collect());
    let trip: Vec<_> = (0..n)
        .flat_map(|a| base.triplets().into_iter().map(move |(i, j, k, v)| (a * d + i, a * d + j, a * d + k, v)))
        .collect();
    AlgebraSpec::new(n * d, names, identity, base.flags().clone(), trip)
}

/// Split bimodule over `⊕ⁿJ₃(𝕆)`.
pub fn build_split_bimodule(n: usize, sector_dims: &SectorDims) -> Result<SplitBimodule> {
    build_split_bimodule_over(&build_j3o(), n, sector_dims)
}

/// `π_L(e^{(a)m}) = L_m ⊗ P^{a·} ⊗ id` and `π_R(e^{(a)m}) = id ⊗ P^{·a} ⊗ R_m`,
/// with `P^{a·} = Σ_j P^{aj}` and `P^{·a} = Σ_i P^{ia}`.
pub fn build_split_bimodule_over(base: &AlgebraSpec, n: usize, sector_dims: &SectorDims) -> Result<SplitBimodule> {
    let algebra = direct_power(base, n)?;
    for &(i, j) in sector_dims.keys() {
        if !(1..=n).contains(&i) || !(1..=n).contains(&j) {
            return Err(Error::InvalidArgument(format!("sector ({i},{j}) outside 1..={n}")));
        }
    }
    let sectors: Vec<(usize, usize)> =
        sector_dims.iter().flat_map(|(&s, &m)| std::iter::repeat_n(s, m)).collect();
    if sectors.is_empty() {
        return Err(Error::EmptyModule);
    }
    let vd = sectors.len();
    let d = base.dim();
    let id = LinearOperator::identity(d);
    let proj = |pick: &dyn Fn((usize, usize)) -> bool| {
        LinearOperator::from_triplets(vd, vd, (0..vd).filter(|&v| pick(sectors[v])).map(|v| (v, v, Rational::one())))
    };
    let lmul = base.left_mult_basis();
    let rmul = base.right_mult_basis();
    let mut left = Vec::with_capacity(n * d);
    let mut right = Vec::with_capacity(n * d);
    for a in 1..=n {
        let pl = proj(&|(i, _)| i == a);
        let pr = proj(&|(_, j)| j == a);
        let pl_id = pl.kron(&id);
        let id_pr = id.kron(&pr);
        for m in 0..d {
            left.push(lmul[m].kron(&pl_id));
            right.push(id_pr.kron(&rmul[m]));
        }
    }
    let dim = d * vd * d;
    Ok(SplitBimodule {
        base: base.clone(),
        left: ModuleAction::new(algebra.clone(), dim, left)?,
        right: ModuleAction::new(algebra.clone(), dim, right)?,
        algebra,
        n_points: n,
        sector_dims: sector_dims.iter().filter(|(_, &m)| m > 0).map(|(k, v)| (*k, *v)).collect(),
        sectors,
    })
}

impl SplitBimodule {
    pub fn base(&self) -> &AlgebraSpec {
        &self.base
    }

    pub fn algebra(&self) -> &AlgebraSpec {
        &self.algebra
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn sector_dims(&self) -> &SectorDims {
        &self.sector_dims
    }

    /// Sector of each multiplicity basis vector.
    pub fn sectors(&self) -> &[(usize, usize)] {
        &self.sectors
    }

    pub fn v_dim(&self) -> usize {
        self.sectors.len()
    }

    pub fn module_dim(&self) -> usize {
        self.base.dim() * self.v_dim() * self.base.dim()
    }

    pub fn left(&self) -> &ModuleAction {
        &self.left
    }

    pub fn right(&self) -> &ModuleAction {
        &self.right
    }

    pub fn index(&self, h: usize, v: usize, k: usize) -> usize {
        (h * self.v_dim() + v) * self.base.dim() + k
    }

    pub fn split_index(&self, idx: usize) -> (usize, usize, usize) {
        let d = self.base.dim();
        let k = idx % d;
        let rest = idx / d;
        (rest / self.v_dim(), rest % self.v_dim(), k)
    }

    /// Sector projector `P^{ij}` on `V`.
    pub fn sector_projector(&self, i: usize, j: usize) -> LinearOperator {
        let vd = self.v_dim();
        LinearOperator::from_triplets(
            vd,
            vd,
            (0..vd).filter(|&v| self.sectors[v] == (i, j)).map(|v| (v, v, Rational::one())),
        )
    }

    /// `[π_L(a), π_R(b)] = 0` on all pairs of basis elements.
    pub fn check_compatibility(&self) -> CompatibilityReport {
        use rayon::prelude::*;
        let n = self.algebra.dim();
        let bad: Vec<(usize, usize)> = (0..n)
            .into_par_iter()
            .flat_map_iter(|a| {
                let l = self.left.basis_op(a);
                (0..n).filter_map(move |b| {
                    let r = self.right.basis_op(b);
                    let c = l.commutator(r).expect("same module");
                    (!c.is_zero()).then_some((a, b))
                })
            })
            .collect();
        CompatibilityReport { pairs_checked: n * n, violations: bad.len(), first_violation: bad.first().copied() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::symmetric_2x2;
    use crate::modules::check_module_axioms;

    fn dims(pairs: &[((usize, usize), usize)]) -> SectorDims {
        pairs.iter().copied().collect()
    }

    #[test]
    fn single_sector_is_tensor_square() {
        let m = build_split_bimodule(1, &dims(&[((1, 1), 1)])).unwrap();
        assert_eq!(m.module_dim(), 729);
        let j = build_j3o();
        let s = j.left_mult_basis();
        let id = LinearOperator::identity(27);
        for i in [0, 3, 20] {
            assert_eq!(m.left().basis_op(i), &s[i].kron(&id));
            assert_eq!(m.right().basis_op(i), &id.kron(&s[i]));
        }
    }

    #[test]
    fn off_diagonal_two_point_module() {
        let m = build_split_bimodule(2, &dims(&[((1, 2), 1), ((2, 1), 1)])).unwrap();
        assert_eq!(m.module_dim(), 1458);
        assert_eq!(m.algebra().dim(), 54);
        let c = m.left().basis_op(5).commutator(m.right().basis_op(27 + 8)).unwrap();
        assert!(c.is_zero());
    }

    #[test]
    fn empty_module_is_rejected() {
        assert!(matches!(build_split_bimodule(2, &SectorDims::new()), Err(Error::EmptyModule)));
        assert!(matches!(build_split_bimodule(2, &dims(&[((1, 2), 0)])), Err(Error::EmptyModule)));
        assert!(build_split_bimodule(2, &dims(&[((3, 1), 1)])).is_err());
    }

    #[test]
    fn projectors_resolve_identity() {
        let m = build_split_bimodule_over(&symmetric_2x2(), 2, &dims(&[((1, 1), 2), ((1, 2), 1), ((2, 2), 1)])).unwrap();
        let mut sum = LinearOperator::zeros(m.v_dim(), m.v_dim());
        for i in 1..=2 {
            for j in 1..=2 {
                let p = m.sector_projector(i, j);
                assert_eq!(p.compose(&p).unwrap(), p);
                sum = sum.add(&p).unwrap();
            }
        }
        assert_eq!(sum, LinearOperator::identity(m.v_dim()));
    }

    #[test]
    fn small_split_modules_satisfy_axioms() {
        let m = build_split_bimodule_over(&symmetric_2x2(), 2, &dims(&[((1, 2), 1), ((2, 2), 2)])).unwrap();
        assert!(check_module_axioms(m.left()).pass);
        assert!(check_module_axioms(m.right()).pass);
        let c = m.check_compatibility();
        assert_eq!(c.violations, 0);
        assert_eq!(c.pairs_checked, 36);
    }

    #[test]
    fn index_round_trip() {
        let m = build_split_bimodule_over(&symmetric_2x2(), 2, &dims(&[((1, 2), 2), ((2, 1), 1)])).unwrap();
        for idx in 0..m.module_dim() {
            let (h, v, k) = m.split_index(idx);
            assert_eq!(m.index(h, v, k), idx);
        }
    }
}
