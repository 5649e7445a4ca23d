//! Inner derivations and the universal 1-form bimodule.

use num_traits::Zero;
use serde::Serialize;

use super::{ansatz_candidates, full_sectors};
use crate::error::Result;
use crate::linalg::{rank_of_span, span_closure_in, Echelon, PrimeField, RationalField, PRIMES};
use crate::modules::{build_split_bimodule, ModuleAction, SplitBimodule};
use crate::operator::{accumulate, LinearOperator, SparseVec};
use crate::to_big;

#[derive(Clone, Debug, Serialize)]
pub struct InnerDerivationReport {
    pub dim: usize,
    pub pairs: usize,
    /// `[π(eⁱ), π(eʲ)] = −[π(eʲ), π(eⁱ)]` and `[π(eⁱ), π(eⁱ)] = 0`.
    pub antisymmetric: bool,
    /// Every commutator kills the identity; only meaningful when the module is
    /// the algebra itself.
    pub annihilates_identity: Option<bool>,
    #[serde(skip)]
    pub basis: Vec<SparseVec>,
}

/// Exact span of `{[π(eⁱ), π(eʲ)] : i < j}`, flattened row-major.
pub fn inner_derivation_span(action: &ModuleAction, module_is_algebra: bool) -> Result<InnerDerivationReport> {
    let n = action.algebra().dim();
    let ops = action.basis_ops();
    let mut flat = Vec::new();
    let mut antisymmetric = true;
    let mut annihilates = true;
    let e0 = action.algebra().identity().map(|e| e.to_vec());
    for i in 0..n {
        antisymmetric &= ops[i].commutator(&ops[i])?.is_zero();
        for j in i + 1..n {
            let c = ops[i].commutator(&ops[j])?;
            let back = ops[j].commutator(&ops[i])?;
            antisymmetric &= c.add(&back)?.is_zero();
            if module_is_algebra {
                if let Some(e0) = &e0 {
                    annihilates &= c.apply(e0)?.iter().all(Zero::is_zero);
                }
            }
            if !c.is_zero() {
                flat.push(c.flatten());
            }
        }
    }
    let m = action.module_dim();
    let field = RationalField;
    let mut ech = Echelon::new(&field, m * m, None);
    let mut basis = Vec::new();
    for v in flat {
        if ech.insert(v.iter().map(|(c, x)| (*c, to_big(x)))) {
            basis.push(v);
        }
    }
    let dim = basis.len();
    Ok(InnerDerivationReport {
        dim,
        pairs: n * (n - 1) / 2,
        antisymmetric,
        annihilates_identity: (module_is_algebra && e0.is_some()).then_some(annihilates),
        basis,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct OneFormReport {
    pub points: usize,
    pub ambient_dim: usize,
    pub dim: usize,
    pub exact: bool,
    pub field: String,
    pub seed_count: usize,
    /// Rank over ℚ of the seeds `Δ[e^{(a)i}]` alone, before closure.
    pub seed_rank: usize,
    pub generator_applications: usize,
}

/// `Δ[e^α]` for the universal derivation with every κ set to one: the sum of
/// all κ-candidates, read back per basis element.
pub fn universal_delta_images(module: &SplitBimodule) -> Result<Vec<SparseVec>> {
    let md = module.module_dim();
    let mut seeds: Vec<SparseVec> = vec![Vec::new(); module.algebra().dim()];
    for (_, v) in ansatz_candidates(module)? {
        for (c, x) in v {
            seeds[c / md].push((c % md, x));
        }
    }
    Ok(seeds.into_iter().map(accumulate).collect())
}

/// Bimodule generated by `Δ[e^{(a)i}] = Σ_c (e^i ⊗^{ac} e⁰ − e⁰ ⊗^{ca} e^i)`
/// inside `J₃(𝕆) ⊗ ℝ^{n²} ⊗ J₃(𝕆)` under both actions of `⊕ⁿJ₃(𝕆)`.
///
/// The closure runs mod a 30-bit prime; independent vectors mod p are
/// independent over ℚ, so reaching the ambient dimension is exact.
pub fn universal_oneform_span(n: usize) -> Result<OneFormReport> {
    let module = build_split_bimodule(n, &full_sectors(n))?;
    let md = module.module_dim();
    let seeds = universal_delta_images(&module)?;
    let seed_rank = rank_of_span(&seeds);
    let generators: Vec<LinearOperator> =
        module.left().basis_ops().iter().chain(module.right().basis_ops()).cloned().collect();
    let f = PrimeField::new(PRIMES[0])?;
    let r = span_closure_in(&f, md, &seeds, &generators, None)?;
    Ok(OneFormReport {
        points: n,
        ambient_dim: md,
        dim: r.dim,
        exact: r.exact,
        field: r.field,
        seed_count: seeds.len(),
        seed_rank,
        generator_applications: r.generator_applications,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{real_line, symmetric_2x2};

    #[test]
    fn real_line_has_no_inner_derivations() {
        let r = inner_derivation_span(&ModuleAction::regular(&real_line()), true).unwrap();
        assert_eq!(r.dim, 0);
    }

    #[test]
    fn spin_factor_inner_derivations() {
        // J₂(ℝ): inner derivations are so(2), dimension 1.
        let r = inner_derivation_span(&ModuleAction::regular(&symmetric_2x2()), true).unwrap();
        assert_eq!(r.dim, 1);
        assert_eq!(r.basis.len(), 1);
        assert_eq!(r.annihilates_identity, Some(true));
        assert!(r.antisymmetric);
    }
}
