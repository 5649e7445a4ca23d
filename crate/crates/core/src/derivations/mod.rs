//! Derivations `Δ: A → M` into (split) bimodules, as kernels of Leibniz systems.
//!
//! Unknown `Δ^α_μ` (the `μ`-th module coordinate of `Δ[e^α]`) sits in column
//! `α·dim M + μ`. The row for `(α, β, μ)` is the `μ`-th coordinate of
//! `Δ[e^α e^β] − π_R(e^β)Δ[e^α] − π_L(e^α)Δ[e^β] = 0`, expanded directly from
//! the Leibniz rule.

mod associative;
mod oneforms;

use std::collections::BTreeMap;

use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{
    primitive_row, rank_of_span, solve_kernel_certified, KernelCertificate, RowDeduper, SolveOptions, SparseBigVec,
    SparseMatrix,
};
use crate::modules::{build_split_bimodule, ModuleAction, SectorDims, SplitBimodule};
use crate::operator::{accumulate, LinearOperator, SparseVec};
use crate::{from_big, to_big, Rational};

pub use associative::{associative_oracle_suite, universal_delta, AssociativeCase, AssociativeOracleReport};
pub use oneforms::{inner_derivation_span, universal_delta_images, universal_oneform_span, InnerDerivationReport, OneFormReport};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LeibnizProvenance {
    pub algebra_dim: usize,
    pub module_dim: usize,
    pub unknowns: usize,
    /// `dim A · dim A · dim M` instantiations of the Leibniz rule.
    pub instantiations: usize,
    pub zero_rows: usize,
    pub duplicate_rows: usize,
    pub rows: usize,
    pub nnz: usize,
}

pub struct ConstraintSystem {
    pub matrix: SparseMatrix,
    pub provenance: LeibnizProvenance,
}

fn check_same_module(left: &ModuleAction, right: &ModuleAction) -> Result<()> {
    if left.algebra() != right.algebra() {
        return Err(Error::Incompatible("left and right actions of different algebras".into()));
    }
    if left.module_dim() != right.module_dim() {
        return Err(Error::DimensionMismatch { expected: left.module_dim(), got: right.module_dim() });
    }
    Ok(())
}

/// Leibniz system for derivations into the bimodule `(π_L, π_R)`.
pub fn assemble_leibniz_system_for(left: &ModuleAction, right: &ModuleAction) -> Result<ConstraintSystem> {
    check_same_module(left, right)?;
    let alg = left.algebra();
    let n = alg.dim();
    let md = left.module_dim();
    let cols = n * md;
    if cols > u32::MAX as usize {
        return Err(Error::InvalidArgument(format!("{cols} unknowns exceed the supported range")));
    }
    let mut dedup = RowDeduper::new(cols);
    let chunk = 2 * rayon::current_num_threads().max(1);
    let alphas: Vec<usize> = (0..n).collect();
    for group in alphas.chunks(chunk) {
        let rows: Vec<Vec<Option<Vec<(u32, i64)>>>> = group
            .par_iter()
            .map(|&a| {
                let mut out = Vec::with_capacity(n * md);
                let mut e: Vec<(usize, Rational)> = Vec::new();
                let la = left.basis_op(a);
                for b in 0..n {
                    let rb = right.basis_op(b);
                    let prod = alg.basis_product(a, b);
                    for mu in 0..md {
                        e.clear();
                        e.extend(prod.iter().map(|(g, f)| (g * md + mu, *f)));
                        e.extend(rb.data[mu].iter().map(|(nu, x)| (a * md + nu, -*x)));
                        e.extend(la.data[mu].iter().map(|(nu, x)| (b * md + nu, -*x)));
                        out.push(primitive_row(&e));
                    }
                }
                out
            })
            .collect();
        for r in rows.into_iter().flatten() {
            dedup.offer_prepared(r);
        }
    }
    let (offered, zero, dup) = (dedup.offered, dedup.zero_rows, dedup.duplicates);
    let matrix = dedup.finish();
    Ok(ConstraintSystem {
        provenance: LeibnizProvenance {
            algebra_dim: n,
            module_dim: md,
            unknowns: cols,
            instantiations: offered,
            zero_rows: zero,
            duplicate_rows: dup,
            rows: matrix.nrows(),
            nnz: matrix.nnz(),
        },
        matrix,
    })
}

/// Leibniz system for derivations `⊕ⁿA → M` into a split bimodule.
pub fn assemble_leibniz_system(module: &SplitBimodule) -> Result<ConstraintSystem> {
    assemble_leibniz_system_for(module.left(), module.right())
}

/// `Δ` as the list of images `Δ[e^α]`, read from a kernel vector.
pub fn derivation_from_vector(v: &[(usize, Rational)], algebra_dim: usize, module_dim: usize) -> Vec<SparseVec> {
    let mut d = vec![Vec::new(); algebra_dim];
    for (c, x) in v {
        d[c / module_dim].push((c % module_dim, *x));
    }
    d
}

/// First basis pair `(α, β)` on which `Δ[e^α e^β] ≠ π_R(e^β)Δ[e^α] + π_L(e^α)Δ[e^β]`,
/// evaluated directly from the actions.
pub fn leibniz_violation(left: &ModuleAction, right: &ModuleAction, delta: &[SparseVec]) -> Result<Option<(usize, usize)>> {
    check_same_module(left, right)?;
    let alg = left.algebra();
    let n = alg.dim();
    if delta.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: delta.len() });
    }
    let lt: Vec<LinearOperator> = left.basis_ops().iter().map(LinearOperator::transpose).collect();
    let rt: Vec<LinearOperator> = right.basis_ops().iter().map(LinearOperator::transpose).collect();
    let bad = (0..n * n).into_par_iter().find_first(|ab| {
        let (a, b) = (ab / n, ab % n);
        let lhs = alg.basis_product(a, b).iter().flat_map(|(g, f)| delta[*g].iter().map(move |(m, x)| (*m, f * x)));
        let r1 = LinearOperator::apply_sparse_with_transpose(&rt[b], &delta[a]);
        let r2 = LinearOperator::apply_sparse_with_transpose(&lt[a], &delta[b]);
        let diff = accumulate(lhs.chain(r1.into_iter().chain(r2).map(|(m, x)| (m, -x))));
        !diff.is_empty()
    });
    Ok(bad.map(|ab| (ab / n, ab % n)))
}

/// One κ per multiplicity vector of each sector.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KappaParameter {
    pub label: String,
    pub sector: (usize, usize),
    pub multiplicity_index: usize,
}

/// Candidate derivations `Δ[e^{(a)i}] = Σ_c (κ_{ac} e^i ⊗^{ac} e⁰ − κ_{ca} e⁰ ⊗^{ca} e^i)`,
/// one per κ.
pub fn ansatz_candidates(module: &SplitBimodule) -> Result<Vec<(KappaParameter, SparseVec)>> {
    let base = module.base();
    let e0: SparseVec = base
        .identity()
        .ok_or_else(|| Error::InvalidArgument("the ansatz needs a unital algebra".into()))?
        .iter()
        .enumerate()
        .filter(|(_, x)| !x.is_zero())
        .map(|(i, x)| (i, *x))
        .collect();
    let d = base.dim();
    let md = module.module_dim();
    let mut out = Vec::new();
    let mut seen_in_sector: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for (v, &(b, c)) in module.sectors().iter().enumerate() {
        let idx = seen_in_sector.entry((b, c)).or_insert(0);
        let mut terms = Vec::new();
        for i in 0..d {
            let alpha_b = (b - 1) * d + i;
            for (k, x) in &e0 {
                terms.push((alpha_b * md + module.index(i, v, *k), *x));
            }
            let alpha_c = (c - 1) * d + i;
            for (h, x) in &e0 {
                terms.push((alpha_c * md + module.index(*h, v, i), -*x));
            }
        }
        let label = if module.v_dim() == module.sector_dims().len() {
            format!("kappa_({b}{c})")
        } else {
            format!("kappa_({b}{c})#{idx}")
        };
        out.push((KappaParameter { label, sector: (b, c), multiplicity_index: *idx }, accumulate(terms)));
        *idx += 1;
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct DerivationSolution {
    pub kernel_dim: usize,
    pub certificate: KernelCertificate,
    pub parametrization: Vec<KappaParameter>,
    /// The candidate derivations are independent and span the whole kernel.
    pub ansatz_spans_kernel: bool,
    /// Every kernel basis vector and every candidate passes the direct Leibniz check.
    pub reverified: bool,
    /// `Δ^{(a)}_{(bc)} = 0` whenever `a ∉ {b, c}`.
    pub cross_sector_vanishing: bool,
    /// `Δ[e⁰] = 0` for the identity of `⊕ⁿA`.
    pub identity_annihilated: bool,
    #[serde(skip)]
    pub basis: Vec<SparseVec>,
}

fn to_small(v: &SparseBigVec) -> Result<SparseVec> {
    v.iter()
        .map(|(c, x)| from_big(x).map(|x| (*c, x)).ok_or_else(|| Error::InvalidArgument("kernel entry exceeds 64 bits".into())))
        .collect()
}

/// Solve the Leibniz system of a split bimodule, with the κ-ansatz as
/// candidate kernel and a modular certificate for the dimension.
pub fn solve_derivation_space(module: &SplitBimodule, system: &ConstraintSystem) -> Result<DerivationSolution> {
    let cands = ansatz_candidates(module)?;
    let big: Vec<SparseBigVec> =
        cands.iter().map(|(_, v)| v.iter().map(|(c, x)| (*c, to_big(x))).collect()).collect();
    let cert = solve_kernel_certified(&system.matrix, &big, &SolveOptions::default())?;
    if !cert.conclusive {
        return Err(Error::Inconclusive { lower: cert.kernel_dim_bounds.0, upper: cert.kernel_dim_bounds.1 });
    }
    let basis: Vec<SparseVec> = cert.kernel_basis.iter().map(to_small).collect::<Result<_>>()?;
    let cand_vecs: Vec<SparseVec> = cands.iter().map(|(_, v)| v.clone()).collect();
    let k = cert.kernel_dim();
    let joint: Vec<SparseVec> = basis.iter().chain(&cand_vecs).cloned().collect();
    let ansatz_spans_kernel = rank_of_span(&cand_vecs) == k && rank_of_span(&joint) == k;

    let n = module.algebra().dim();
    let md = module.module_dim();
    let d = module.base().dim();
    let mut reverified = true;
    for v in basis.iter().chain(&cand_vecs) {
        let delta = derivation_from_vector(v, n, md);
        reverified &= leibniz_violation(module.left(), module.right(), &delta)?.is_none();
    }
    let cross_sector_vanishing = basis.iter().flatten().all(|(col, _)| {
        let a = col / md / d + 1;
        let (_, v, _) = module.split_index(col % md);
        let (b, c) = module.sectors()[v];
        a == b || a == c
    });
    let e0 = module.algebra().identity().map(|e| e.to_vec());
    let identity_annihilated = match &e0 {
        None => true,
        Some(e0) => basis.iter().all(|v| {
            let delta = derivation_from_vector(v, n, md);
            accumulate(e0.iter().enumerate().flat_map(|(a, x)| delta[a].iter().map(move |(m, y)| (*m, x * y)))).is_empty()
        }),
    };
    Ok(DerivationSolution {
        kernel_dim: k,
        certificate: cert,
        parametrization: cands.into_iter().map(|(p, _)| p).collect(),
        ansatz_spans_kernel,
        reverified,
        cross_sector_vanishing,
        identity_annihilated,
        basis,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct SectorSolve {
    pub sector: (usize, usize),
    pub provenance: LeibnizProvenance,
    pub solution: DerivationSolution,
}

#[derive(Clone, Debug, Serialize)]
pub struct MonolithicSolve {
    pub provenance: LeibnizProvenance,
    pub solution: DerivationSolution,
}

#[derive(Clone, Debug, Serialize)]
pub struct DerivationReport {
    pub points: usize,
    pub sector_dims: Vec<((usize, usize), usize)>,
    pub kernel_dim: usize,
    pub decomposed: Vec<SectorSolve>,
    pub monolithic: Option<MonolithicSolve>,
    /// Decomposed and monolithic kernel dimensions agree (when both ran).
    pub paths_agree: Option<bool>,
    pub pass: bool,
}

/// Derivations `⊕ⁿJ₃(𝕆) → J₃(𝕆) ⊗ V ⊗ J₃(𝕆)`. The module is a direct sum of
/// single-sector bimodules, so each sector is solved on its own; the full
/// module can additionally be solved in one system as a cross-check.
pub fn solve_derivations(n: usize, sector_dims: &SectorDims, monolithic: bool) -> Result<DerivationReport> {
    let mut decomposed = Vec::new();
    for (&s, &m) in sector_dims.iter().filter(|(_, &m)| m > 0) {
        let single: SectorDims = [(s, m)].into_iter().collect();
        let module = build_split_bimodule(n, &single)?;
        let system = assemble_leibniz_system(&module)?;
        let solution = solve_derivation_space(&module, &system)?;
        decomposed.push(SectorSolve { sector: s, provenance: system.provenance, solution });
    }
    if decomposed.is_empty() {
        return Err(Error::EmptyModule);
    }
    let kernel_dim = decomposed.iter().map(|s| s.solution.kernel_dim).sum();
    let mono = if monolithic && decomposed.len() > 1 {
        let module = build_split_bimodule(n, sector_dims)?;
        let system = assemble_leibniz_system(&module)?;
        let solution = solve_derivation_space(&module, &system)?;
        Some(MonolithicSolve { provenance: system.provenance, solution })
    } else {
        None
    };
    let paths_agree = mono.as_ref().map(|m| m.solution.kernel_dim == kernel_dim);
    let sound = |s: &DerivationSolution| s.reverified && s.ansatz_spans_kernel && s.cross_sector_vanishing && s.identity_annihilated;
    let pass = decomposed.iter().all(|s| sound(&s.solution))
        && mono.as_ref().is_none_or(|m| sound(&m.solution))
        && paths_agree.unwrap_or(true);
    Ok(DerivationReport {
        points: n,
        sector_dims: sector_dims.iter().map(|(k, v)| (*k, *v)).collect(),
        kernel_dim,
        decomposed,
        monolithic: mono,
        paths_agree,
        pass,
    })
}

/// All `n²` sectors with multiplicity one.
pub fn full_sectors(n: usize) -> SectorDims {
    (1..=n).flat_map(|b| (1..=n).map(move |c| ((b, c), 1))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{real_line, symmetric_2x2};
    use crate::int;
    use crate::modules::build_split_bimodule_over;

    #[test]
    fn real_line_forces_zero() {
        let m = build_split_bimodule_over(&real_line(), 1, &full_sectors(1)).unwrap();
        let s = assemble_leibniz_system(&m).unwrap();
        assert_eq!(s.provenance.rows, 1);
        assert_eq!(s.matrix.row_entries(0).collect::<Vec<_>>(), vec![(0, int(-1))]);
        let cands = ansatz_candidates(&m).unwrap();
        assert!(cands[0].1.is_empty());
    }

    #[test]
    fn small_jordan_split_module_has_one_derivation_per_sector() {
        let j2 = symmetric_2x2();
        let m = build_split_bimodule_over(&j2, 2, &full_sectors(2)).unwrap();
        let s = assemble_leibniz_system(&m).unwrap();
        assert_eq!(s.provenance.instantiations, 36 * m.module_dim());
        let sol = solve_derivation_space(&m, &s).unwrap();
        assert_eq!(sol.kernel_dim, 4);
        assert!(sol.ansatz_spans_kernel && sol.reverified && sol.cross_sector_vanishing && sol.identity_annihilated);
    }

    #[test]
    fn violation_is_detected() {
        let j2 = symmetric_2x2();
        let m = build_split_bimodule_over(&j2, 1, &full_sectors(1)).unwrap();
        let mut delta = vec![Vec::new(); 3];
        delta[0] = vec![(0, int(1))];
        assert!(leibniz_violation(m.left(), m.right(), &delta).unwrap().is_some());
        let zero = vec![Vec::new(); 3];
        assert!(leibniz_violation(m.left(), m.right(), &zero).unwrap().is_none());
    }
}
