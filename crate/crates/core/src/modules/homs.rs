//! Homomorphisms between modules and split bimodules.

use serde::Serialize;

use super::split::{SectorDims, SplitBimodule};
use super::ModuleAction;
use crate::algebra::AlgebraSpec;
use crate::error::{Error, Result};
use crate::linalg::{solve_kernel_certified, KernelCertificate, RowDeduper, SolveOptions};
use crate::operator::LinearOperator;
use crate::{from_big, Rational};

/// `φ = id ⊗ Γ ⊗ id` for a linear `Γ: V → W`.
#[derive(Clone, Debug, Serialize)]
pub struct BimoduleHom {
    #[serde(skip)]
    pub gamma: LinearOperator,
    /// Nonzero entries `(w, v, Γ_wv)`.
    pub gamma_entries: Vec<(usize, usize, String)>,
    pub sector_preserving: bool,
}

impl BimoduleHom {
    fn new(gamma: LinearOperator, src: &[(usize, usize)], tgt: &[(usize, usize)]) -> Self {
        let sector_preserving = gamma.triplets().all(|(w, v, _)| tgt[w] == src[v]);
        let gamma_entries = gamma.triplets().map(|(w, v, x)| (w, v, x.to_string())).collect();
        Self { gamma, gamma_entries, sector_preserving }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct HomClassification {
    pub route: String,
    pub dim: usize,
    /// `c_L·c_R·Σ dim V^{ij}·dim W^{ij}` with `c` the commutant dimension of the
    /// regular representation (`c = 1` for simple algebras such as J₃(𝕆)).
    pub formula_dim: usize,
    pub commutant_dim: usize,
    /// Every basis hom has the `id ⊗ Γ ⊗ id` form.
    pub gamma_shape: bool,
    pub sector_preserving: bool,
    /// Every basis hom was checked to intertwine both actions exactly.
    pub intertwining_verified: bool,
    pub certificate: Option<KernelCertificate>,
    pub homs: Vec<BimoduleHom>,
}

/// Kernel of `φ ↦ (B φ − φ A)` over all pairs `(A on M, B on N)`; unknown `φ[r][c]`
/// sits at column `r·dim M + c`.
fn intertwiner_kernel(pairs: &[(&LinearOperator, &LinearOperator)], dm: usize, dn: usize) -> Result<(KernelCertificate, Vec<LinearOperator>)> {
    let mut rows = RowDeduper::new(dm * dn);
    for (a, b) in pairs {
        let at = a.transpose();
        for r in 0..dn {
            for c in 0..dm {
                let mut e: Vec<(usize, Rational)> = b.data[r].iter().map(|(k, x)| (k * dm + c, *x)).collect();
                e.extend(at.data[c].iter().map(|(k, x)| (r * dm + k, -*x)));
                rows.offer(&e);
            }
        }
    }
    let m = rows.finish();
    let opts = SolveOptions { exact_limit: usize::MAX, ..SolveOptions::default() };
    let cert = solve_kernel_certified(&m, &[], &opts)?.require_conclusive()?;
    let ops = cert
        .kernel_basis
        .iter()
        .map(|v| {
            let trip = v.iter().map(|(i, x)| {
                let x = from_big(x).ok_or_else(|| Error::InvalidArgument("kernel entry exceeds 64 bits".into()))?;
                Ok((i / dm, i % dm, x))
            });
            Ok(LinearOperator::from_triplets(dn, dm, trip.collect::<Result<Vec<_>>>()?))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((cert, ops))
}

/// Dimension of the commutant of the left regular representation.
pub fn regular_commutant_dim(algebra: &AlgebraSpec) -> Result<usize> {
    let l = algebra.left_mult_basis();
    let pairs: Vec<_> = l.iter().map(|x| (x, x)).collect();
    Ok(intertwiner_kernel(&pairs, algebra.dim(), algebra.dim())?.0.kernel_dim())
}

/// Module homs `A ⊗ ℝᵖ → A ⊗ ℝ^q` for the regular action with multiplicity,
/// by brute force over all `(27q)×(27p)` entries when `A = J₃(𝕆)`.
pub fn classify_module_homs(algebra: &AlgebraSpec, p: usize, q: usize) -> Result<HomClassification> {
    let reg = ModuleAction::regular(algebra);
    let m = reg.with_multiplicity(p)?;
    let n = reg.with_multiplicity(q)?;
    let pairs: Vec<_> = m.basis_ops().iter().zip(n.basis_ops()).collect();
    let (cert, ops) = intertwiner_kernel(&pairs, m.module_dim(), n.module_dim())?;
    let c = regular_commutant_dim(algebra)?;
    let d = algebra.dim();
    let id = LinearOperator::identity(d);
    let src = vec![(1, 1); p];
    let tgt = vec![(1, 1); q];
    let mut homs = Vec::new();
    let mut shape = true;
    for phi in &ops {
        // φ = id ⊗ Γ with Γ read off the first block.
        let gamma = LinearOperator::from_triplets(q, p, (0..q).flat_map(|w| (0..p).map(move |v| (w, v))).map(|(w, v)| (w, v, phi.get(w, v))));
        shape &= id.kron(&gamma) == *phi;
        homs.push(BimoduleHom::new(gamma, &src, &tgt));
    }
    let verified = ops.iter().all(|phi| pairs.iter().all(|(a, b)| b.compose(phi).ok() == phi.compose(a).ok()));
    Ok(HomClassification {
        route: "brute_force".into(),
        dim: cert.kernel_dim(),
        formula_dim: c * p * q,
        commutant_dim: c,
        gamma_shape: shape,
        sector_preserving: true,
        intertwining_verified: verified,
        certificate: Some(cert),
        homs,
    })
}

fn check_compatible(m: &SplitBimodule, n: &SplitBimodule) -> Result<()> {
    if m.base() != n.base() || m.n_points() != n.n_points() {
        return Err(Error::Incompatible("bimodules over different algebras".into()));
    }
    Ok(())
}

fn formula(m: &SplitBimodule, n: &SplitBimodule) -> usize {
    m.sector_dims().iter().map(|(s, dv)| dv * n.sector_dims().get(s).copied().unwrap_or(0)).sum()
}

fn phi_of(gamma: &LinearOperator, d: usize) -> LinearOperator {
    let id = LinearOperator::identity(d);
    id.kron(gamma).kron(&id)
}

fn intertwines(m: &SplitBimodule, n: &SplitBimodule, phi: &LinearOperator) -> bool {
    use rayon::prelude::*;
    let k = m.algebra().dim();
    (0..k).into_par_iter().all(|a| {
        [(m.left(), n.left()), (m.right(), n.right())].iter().all(|(pm, pn)| {
            pn.basis_op(a).compose(phi).ok() == phi.compose(pm.basis_op(a)).ok()
        })
    })
}

/// Solve the intertwining conditions for both actions directly over all
/// entries of `φ`. Only feasible for small base algebras.
pub fn classify_homs_brute_force(m: &SplitBimodule, n: &SplitBimodule) -> Result<HomClassification> {
    check_compatible(m, n)?;
    let k = m.algebra().dim();
    let pairs: Vec<_> = (0..k)
        .flat_map(|a| [(m.left().basis_op(a), n.left().basis_op(a)), (m.right().basis_op(a), n.right().basis_op(a))])
        .collect();
    let (cert, ops) = intertwiner_kernel(&pairs, m.module_dim(), n.module_dim())?;
    let c = regular_commutant_dim(m.base())?;
    let d = m.base().dim();
    let (vd, wd) = (m.v_dim(), n.v_dim());
    let mut homs = Vec::new();
    let mut shape = true;
    for phi in &ops {
        let gamma = LinearOperator::from_triplets(
            wd,
            vd,
            (0..wd).flat_map(|w| (0..vd).map(move |v| (w, v))).map(|(w, v)| (w, v, phi.get(n.index(0, w, 0), m.index(0, v, 0)))),
        );
        shape &= phi_of(&gamma, d) == *phi;
        homs.push(BimoduleHom::new(gamma, m.sectors(), n.sectors()));
    }
    Ok(HomClassification {
        route: "brute_force".into(),
        dim: cert.kernel_dim(),
        formula_dim: c * c * formula(m, n),
        commutant_dim: c,
        gamma_shape: shape,
        sector_preserving: homs.iter().all(|h| h.sector_preserving),
        intertwining_verified: ops.iter().all(|phi| intertwines(m, n, phi)),
        certificate: Some(cert),
        homs,
    })
}

/// Factorised route. The identity of each factor acts as a sector projector on
/// either side, so a hom preserves sectors; within a sector it commutes with
/// `L_a ⊗ id ⊗ id` and `id ⊗ id ⊗ R_a`. The hom space is therefore
/// `C_L ⊗ Hom_sectors(V, W) ⊗ C_R` with `C` the commutant of the regular
/// representation. `C` and the sector-preserving `Γ` are both solved exactly,
/// and each resulting `id ⊗ Γ ⊗ id` is checked against every basis action.
pub fn classify_homs_factorized(m: &SplitBimodule, n: &SplitBimodule) -> Result<HomClassification> {
    check_compatible(m, n)?;
    let c = regular_commutant_dim(m.base())?;
    let mut projectors = Vec::new();
    for a in 1..=m.n_points() {
        let side = |s: &SplitBimodule, pick: &dyn Fn((usize, usize)) -> bool| {
            LinearOperator::from_triplets(
                s.v_dim(),
                s.v_dim(),
                (0..s.v_dim()).filter(|&v| pick(s.sectors()[v])).map(|v| (v, v, Rational::from_integer(1))),
            )
        };
        projectors.push((side(m, &|(i, _)| i == a), side(n, &|(i, _)| i == a)));
        projectors.push((side(m, &|(_, j)| j == a), side(n, &|(_, j)| j == a)));
    }
    let pairs: Vec<_> = projectors.iter().map(|(p, q)| (p, q)).collect();
    let (cert, gammas) = intertwiner_kernel(&pairs, m.v_dim(), n.v_dim())?;
    let d = m.base().dim();
    let verified = c == 1 && gammas.iter().all(|g| intertwines(m, n, &phi_of(g, d)));
    let homs: Vec<BimoduleHom> = gammas.into_iter().map(|g| BimoduleHom::new(g, m.sectors(), n.sectors())).collect();
    Ok(HomClassification {
        route: "factorized".into(),
        dim: c * c * cert.kernel_dim(),
        formula_dim: c * c * formula(m, n),
        commutant_dim: c,
        gamma_shape: true,
        sector_preserving: homs.iter().all(|h| h.sector_preserving),
        intertwining_verified: verified,
        certificate: Some(cert),
        homs,
    })
}

/// Brute force when the unknown count is small, factorised otherwise.
pub fn classify_bimodule_homs(m: &SplitBimodule, n: &SplitBimodule) -> Result<HomClassification> {
    if m.module_dim() * n.module_dim() <= 20_000 {
        classify_homs_brute_force(m, n)
    } else {
        classify_homs_factorized(m, n)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct HomSuiteCase {
    pub points: usize,
    pub source: Vec<((usize, usize), usize)>,
    pub target: Vec<((usize, usize), usize)>,
    /// `Σ dim V^{ij}·dim W^{ij}`.
    pub formula_dim: usize,
    /// Over J₃(𝕆), factorised and checked against every basis action.
    pub j3o_dim: usize,
    /// Over J₂(ℝ), by brute force on every entry of `φ`.
    pub brute_force_dim: usize,
    pub brute_force_factorized_dim: usize,
    pub sector_preserving: bool,
    pub intertwining_verified: bool,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct HomSuiteReport {
    pub cases: Vec<HomSuiteCase>,
    pub pass: bool,
}

type Config = (usize, &'static [((usize, usize), usize)], &'static [((usize, usize), usize)]);

const HOM_SUITE: [Config; 6] = [
    (2, &[((1, 2), 1)], &[((1, 2), 1)]),
    (2, &[((1, 1), 1), ((1, 2), 1)], &[((1, 1), 2), ((1, 2), 1), ((2, 1), 1)]),
    (2, &[((1, 2), 1)], &[((2, 1), 1)]),
    (2, &[((1, 1), 1), ((2, 2), 2)], &[((1, 1), 1), ((2, 2), 1)]),
    (3, &[((1, 2), 1), ((2, 3), 1), ((3, 1), 1)], &[((1, 2), 2), ((2, 3), 1)]),
    (3, &[((1, 1), 1), ((2, 2), 1), ((3, 3), 1)], &[((1, 1), 1), ((2, 2), 1), ((3, 3), 1)]),
];

/// Hom spaces between split bimodules on a fixed set of sector
/// configurations. Each is classified over J₃(𝕆) by the factorised route and
/// over J₂(ℝ) by brute force, where the same count must come out.
pub fn hom_suite() -> Result<HomSuiteReport> {
    use crate::algebra::{build_j3o, symmetric_2x2};
    use super::split::build_split_bimodule_over;
    let j3o = build_j3o();
    let j2 = symmetric_2x2();
    let mut cases = Vec::new();
    for (n, src, tgt) in HOM_SUITE {
        let sd: SectorDims = src.iter().copied().collect();
        let td: SectorDims = tgt.iter().copied().collect();
        let big = classify_homs_factorized(&build_split_bimodule_over(&j3o, n, &sd)?, &build_split_bimodule_over(&j3o, n, &td)?)?;
        let (sm, tm) = (build_split_bimodule_over(&j2, n, &sd)?, build_split_bimodule_over(&j2, n, &td)?);
        let brute = classify_homs_brute_force(&sm, &tm)?;
        let fact = classify_homs_factorized(&sm, &tm)?;
        let formula_dim = big.formula_dim;
        let sector_preserving = big.sector_preserving && brute.sector_preserving;
        let intertwining_verified = big.intertwining_verified && brute.intertwining_verified && fact.intertwining_verified;
        let pass = big.dim == formula_dim
            && brute.dim == formula_dim
            && fact.dim == formula_dim
            && brute.gamma_shape
            && sector_preserving
            && intertwining_verified;
        cases.push(HomSuiteCase {
            points: n,
            source: src.to_vec(),
            target: tgt.to_vec(),
            formula_dim,
            j3o_dim: big.dim,
            brute_force_dim: brute.dim,
            brute_force_factorized_dim: fact.dim,
            sector_preserving,
            intertwining_verified,
            pass,
        });
    }
    let pass = cases.iter().all(|c| c.pass);
    Ok(HomSuiteReport { cases, pass })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{build_j3o, diagonal_algebra, symmetric_2x2};
    use crate::modules::{build_split_bimodule, build_split_bimodule_over, SectorDims};

    fn dims(pairs: &[((usize, usize), usize)]) -> SectorDims {
        pairs.iter().copied().collect()
    }

    #[test]
    fn j3o_regular_commutant_is_scalar() {
        assert_eq!(regular_commutant_dim(&build_j3o()).unwrap(), 1);
        assert_eq!(regular_commutant_dim(&symmetric_2x2()).unwrap(), 1);
        assert_eq!(regular_commutant_dim(&diagonal_algebra(2)).unwrap(), 2);
    }

    #[test]
    fn regular_j3o_module_has_scalar_homs() {
        let r = classify_module_homs(&build_j3o(), 1, 1).unwrap();
        assert_eq!(r.dim, 1);
        assert!(r.gamma_shape && r.intertwining_verified);
    }

    #[test]
    fn brute_force_matches_formula_on_small_split_modules() {
        let j2 = symmetric_2x2();
        let m = build_split_bimodule_over(&j2, 2, &dims(&[((1, 2), 1), ((2, 2), 1)])).unwrap();
        let n = build_split_bimodule_over(&j2, 2, &dims(&[((1, 2), 2), ((2, 1), 1)])).unwrap();
        let r = classify_homs_brute_force(&m, &n).unwrap();
        assert_eq!(r.dim, 2);
        assert_eq!(r.formula_dim, 2);
        assert!(r.gamma_shape && r.sector_preserving && r.intertwining_verified);
        let f = classify_homs_factorized(&m, &n).unwrap();
        assert_eq!(f.dim, r.dim);
    }

    #[test]
    fn sector_mismatch_forces_zero() {
        let a = build_split_bimodule(2, &dims(&[((1, 2), 1)])).unwrap();
        let b = build_split_bimodule(2, &dims(&[((2, 1), 1)])).unwrap();
        let r = classify_bimodule_homs(&a, &b).unwrap();
        assert_eq!(r.route, "factorized");
        assert_eq!(r.dim, 0);
    }

    #[test]
    fn factorized_homs_on_j3o_intertwine() {
        let a = build_split_bimodule(2, &dims(&[((1, 2), 1), ((2, 1), 1)])).unwrap();
        let r = classify_homs_factorized(&a, &a).unwrap();
        assert_eq!(r.dim, 2);
        assert!(r.intertwining_verified && r.sector_preserving);
    }

    #[test]
    fn suite_matches_formula() {
        let r = hom_suite().unwrap();
        assert!(r.pass, "{r:?}");
        let dims: Vec<usize> = r.cases.iter().map(|c| c.formula_dim).collect();
        assert_eq!(dims, [1, 3, 0, 3, 3, 3]);
    }
}
