//! Finite-dimensional algebras given by structure constants.

mod examples;
mod format;
mod j3o;
mod sigma;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::operator::{accumulate, dense_from_sparse, sparse_from_dense, LinearOperator, SparseVec};
use crate::Rational;

pub use examples::{diagonal_algebra, matrix_algebra_2x2, real_line, symmetric_2x2};
pub use format::{parse_algebra_file, serialize_algebra};
pub use j3o::{
    build_j3o, j3o_gram, j3o_index, jordan_trace, primitive_idempotents_standard, MatrixModel, DIAGONAL,
};
pub use sigma::{sigma_basis, SigmaBasis, SigmaReport, Q23};

/// Declared properties, validated whenever a spec is constructed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Flag {
    Commutative,
    Unital,
    Associative,
    Jordan,
}

impl Flag {
    pub fn name(self) -> &'static str {
        match self {
            Flag::Commutative => "commutative",
            Flag::Unital => "unital",
            Flag::Associative => "associative",
            Flag::Jordan => "jordan",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "commutative" => Flag::Commutative,
            "unital" => Flag::Unital,
            "associative" => Flag::Associative,
            "jordan" => Flag::Jordan,
            _ => return None,
        })
    }
}

/// Which identity [`AlgebraSpec::check_identity`] sweeps.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum IdentityKind {
    Jordan,
    Associative,
    Commutative,
    PowerAssocLow,
}

impl IdentityKind {
    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "jordan" => IdentityKind::Jordan,
            "associative" => IdentityKind::Associative,
            "commutative" => IdentityKind::Commutative,
            "power_assoc_low" | "power-assoc-low" => IdentityKind::PowerAssocLow,
            _ => return None,
        })
    }
}

/// A violated instance of an identity: the basis tuple and the nonzero residual.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub tuple: Vec<usize>,
    pub residual: Vec<(usize, String)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IdentityReport {
    pub identity: IdentityKind,
    pub pass: bool,
    pub tuples_checked: usize,
    pub violations: usize,
    pub witnesses: Vec<Witness>,
}

const MAX_WITNESSES: usize = 5;

/// Algebra given by sparse structure constants `e^i e^j = f^{ij}_k e^k`.
///
/// The identity is stored as a coordinate vector, since in some bases (the
/// J₃(𝕆) e-basis among them) it is a sum of basis elements rather than one.
#[derive(Clone, PartialEq, Eq)]
pub struct AlgebraSpec {
    dim: usize,
    identity: Option<Vec<Rational>>,
    identity_index: Option<usize>,
    basis_names: Vec<String>,
    flags: BTreeSet<Flag>,
    table: Vec<SparseVec>,
}

impl fmt::Debug for AlgebraSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "AlgebraSpec(dim={}, nnz={}, flags={:?})", self.dim, self.nnz(), self.flags)
    }
}

impl AlgebraSpec {
    /// Build and validate. `triplets` are `(i, j, k, f^{ij}_k)`; duplicates are rejected.
    pub fn new(
        dim: usize,
        basis_names: Vec<String>,
        identity: Option<Vec<Rational>>,
        flags: BTreeSet<Flag>,
        triplets: impl IntoIterator<Item = (usize, usize, usize, Rational)>,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidAlgebra("dimension must be positive".into()));
        }
        if basis_names.len() != dim {
            return Err(Error::InvalidAlgebra(format!("{} basis names for dimension {dim}", basis_names.len())));
        }
        let mut seen = BTreeMap::new();
        for (i, j, k, v) in triplets {
            if i >= dim || j >= dim || k >= dim {
                return Err(Error::InvalidAlgebra(format!("index ({i}, {j}, {k}) out of range for dimension {dim}")));
            }
            if seen.insert((i, j, k), v).is_some() {
                return Err(Error::InvalidAlgebra(format!("duplicate structure constant ({i}, {j}, {k})")));
            }
        }
        let mut table = vec![Vec::new(); dim * dim];
        for ((i, j, k), v) in seen {
            if !v.is_zero() {
                table[i * dim + j].push((k, v));
            }
        }
        if let Some(e) = &identity {
            if e.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: e.len() });
            }
        }
        let identity_index = identity.as_ref().and_then(|e| {
            let nz: Vec<usize> = (0..dim).filter(|&i| !e[i].is_zero()).collect();
            (nz.len() == 1 && e[nz[0]].is_one()).then(|| nz[0])
        });
        let spec = Self { dim, identity, identity_index, basis_names, flags, table };
        spec.validate()?;
        Ok(spec)
    }

    fn validate(&self) -> Result<()> {
        if let Some(e) = &self.identity {
            for j in 0..self.dim {
                let ej = self.basis(j);
                let l = self.product(e, &ej)?;
                let r = self.product(&ej, e)?;
                if l != ej || r != ej {
                    return Err(Error::IdentityAxiom(format!(
                        "e0 does not act as identity on {}",
                        self.basis_names[j]
                    )));
                }
            }
        } else if self.flags.contains(&Flag::Unital) {
            return Err(Error::InvalidAlgebra("flag `unital` declared without an identity".into()));
        }
        let declared: Vec<(Flag, IdentityKind)> = [
            (Flag::Commutative, IdentityKind::Commutative),
            (Flag::Associative, IdentityKind::Associative),
            (Flag::Jordan, IdentityKind::Jordan),
        ]
        .into_iter()
        .filter(|(f, _)| self.flags.contains(f))
        .collect();
        for (flag, kind) in declared {
            let report = self.check_identity(kind);
            if !report.pass {
                let witness = report
                    .witnesses
                    .first()
                    .map(|w| format!("basis tuple {:?}", w.tuple))
                    .unwrap_or_default();
                return Err(Error::FlagViolated { flag: flag.name().into(), witness });
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn identity(&self) -> Option<&[Rational]> {
        self.identity.as_deref()
    }

    pub fn identity_index(&self) -> Option<usize> {
        self.identity_index
    }

    pub fn basis_names(&self) -> &[String] {
        &self.basis_names
    }

    pub fn flags(&self) -> &BTreeSet<Flag> {
        &self.flags
    }

    pub fn has_flag(&self, f: Flag) -> bool {
        self.flags.contains(&f)
    }

    /// Number of stored nonzero structure constants.
    pub fn nnz(&self) -> usize {
        self.table.iter().map(Vec::len).sum()
    }

    /// All nonzero `(i, j, k, f^{ij}_k)` in lexicographic order.
    pub fn triplets(&self) -> Vec<(usize, usize, usize, Rational)> {
        let mut out = Vec::with_capacity(self.nnz());
        for i in 0..self.dim {
            for j in 0..self.dim {
                for (k, v) in &self.table[i * self.dim + j] {
                    out.push((i, j, *k, *v));
                }
            }
        }
        out
    }

    /// Distinct values taken by the structure constants.
    pub fn constant_values(&self) -> BTreeSet<Rational> {
        self.table.iter().flatten().map(|(_, v)| *v).collect()
    }

    /// `e^i e^j` as a sparse vector.
    pub fn basis_product(&self, i: usize, j: usize) -> &SparseVec {
        &self.table[i * self.dim + j]
    }

    pub fn basis(&self, i: usize) -> Vec<Rational> {
        let mut v = vec![Rational::zero(); self.dim];
        v[i] = Rational::one();
        v
    }

    pub fn zero(&self) -> Vec<Rational> {
        vec![Rational::zero(); self.dim]
    }

    fn check_len(&self, v: &[Rational]) -> Result<()> {
        if v.len() != self.dim {
            return Err(Error::Incompatible(format!(
                "element of length {} used with an algebra of dimension {}",
                v.len(),
                self.dim
            )));
        }
        Ok(())
    }

    pub fn product(&self, a: &[Rational], b: &[Rational]) -> Result<Vec<Rational>> {
        self.check_len(a)?;
        self.check_len(b)?;
        let p = self.product_sparse(&sparse_from_dense(a), &sparse_from_dense(b));
        Ok(dense_from_sparse(&p, self.dim))
    }

    pub fn product_sparse(&self, a: &[(usize, Rational)], b: &[(usize, Rational)]) -> SparseVec {
        accumulate(a.iter().flat_map(|(i, x)| {
            b.iter().flat_map(move |(j, y)| {
                let xy = x * y;
                self.table[i * self.dim + j].iter().map(move |(k, f)| (*k, xy * f))
            })
        }))
    }

    /// `(ab)c − a(bc)`.
    pub fn associator(&self, a: &[Rational], b: &[Rational], c: &[Rational]) -> Result<Vec<Rational>> {
        let l = self.product(&self.product(a, b)?, c)?;
        let r = self.product(a, &self.product(b, c)?)?;
        Ok(l.iter().zip(&r).map(|(x, y)| x - y).collect())
    }

    /// `S_a`: the operator `v ↦ a v`.
    pub fn left_mult_operator(&self, a: &[Rational]) -> Result<LinearOperator> {
        self.check_len(a)?;
        let sa = sparse_from_dense(a);
        Ok(LinearOperator::from_triplets(
            self.dim,
            self.dim,
            (0..self.dim).flat_map(|j| {
                self.product_sparse(&sa, &[(j, Rational::one())]).into_iter().map(move |(k, v)| (k, j, v))
            }),
        ))
    }

    /// `R_a`: the operator `v ↦ v a`.
    pub fn right_mult_operator(&self, a: &[Rational]) -> Result<LinearOperator> {
        self.check_len(a)?;
        let sa = sparse_from_dense(a);
        Ok(LinearOperator::from_triplets(
            self.dim,
            self.dim,
            (0..self.dim).flat_map(|j| {
                self.product_sparse(&[(j, Rational::one())], &sa).into_iter().map(move |(k, v)| (k, j, v))
            }),
        ))
    }

    pub fn left_mult_basis(&self) -> Vec<LinearOperator> {
        (0..self.dim).map(|i| self.left_mult_operator(&self.basis(i)).expect("basis length")).collect()
    }

    pub fn right_mult_basis(&self) -> Vec<LinearOperator> {
        (0..self.dim).map(|i| self.right_mult_operator(&self.basis(i)).expect("basis length")).collect()
    }

    /// Direct sum `A ⊕ B`; basis of `B` is shifted by `dim A`, names get the
    /// given suffixes, and only flags held by both summands survive.
    pub fn direct_sum(&self, other: &AlgebraSpec, suffixes: (&str, &str)) -> Result<AlgebraSpec> {
        let n = self.dim;
        let names = self
            .basis_names
            .iter()
            .map(|s| format!("{s}{}", suffixes.0))
            .chain(other.basis_names.iter().map(|s| format!("{s}{}", suffixes.1)))
            .collect();
        let identity = match (&self.identity, &other.identity) {
            (Some(a), Some(b)) => Some(a.iter().chain(b).copied().collect()),
            _ => None,
        };
        let flags = self.flags.intersection(&other.flags).copied().collect();
        let trip = self
            .triplets()
            .into_iter()
            .chain(other.triplets().into_iter().map(|(i, j, k, v)| (i + n, j + n, k + n, v)));
        AlgebraSpec::new(n + other.dim, names, identity, flags, trip)
    }

    /// Exhaustive exact sweep of a polynomial identity over basis tuples.
    pub fn check_identity(&self, kind: IdentityKind) -> IdentityReport {
        let n = self.dim;
        let unit = |i: usize| -> SparseVec { vec![(i, Rational::one())] };
        let mul = |a: &SparseVec, b: &SparseVec| self.product_sparse(a, b);
        let sub = |a: SparseVec, b: SparseVec| accumulate(a.into_iter().chain(b.into_iter().map(|(k, v)| (k, -v))));

        // Each outer index yields (tuples checked, violations).
        let per_outer: Vec<(usize, Vec<(Vec<usize>, SparseVec)>)> = match kind {
            IdentityKind::Commutative => (0..n)
                .into_par_iter()
                .map(|i| {
                    let mut bad = Vec::new();
                    for j in i + 1..n {
                        let r = sub(self.basis_product(i, j).clone(), self.basis_product(j, i).clone());
                        if !r.is_empty() {
                            bad.push((vec![i, j], r));
                        }
                    }
                    (n - i - 1, bad)
                })
                .collect(),
            IdentityKind::Associative => (0..n)
                .into_par_iter()
                .map(|i| {
                    let mut bad = Vec::new();
                    for j in 0..n {
                        let ij = self.basis_product(i, j);
                        for k in 0..n {
                            let l = mul(ij, &unit(k));
                            let r = mul(&unit(i), self.basis_product(j, k));
                            let d = sub(l, r);
                            if !d.is_empty() {
                                bad.push((vec![i, j, k], d));
                            }
                        }
                    }
                    (n * n, bad)
                })
                .collect(),
            IdentityKind::Jordan => {
                let comm = self.check_identity(IdentityKind::Commutative);
                if !comm.pass {
                    return IdentityReport { identity: kind, ..comm };
                }
                // [L_x, L_{yz}] + [L_y, L_{zx}] + [L_z, L_{xy}] applied to w,
                // symmetric in x, y, z, so multisets x ≤ y ≤ z suffice.
                (0..n)
                    .into_par_iter()
                    .map(|x| {
                        let mut bad = Vec::new();
                        let mut count = 0;
                        for y in x..n {
                            for z in y..n {
                                let triple = [(x, y, z), (y, z, x), (z, x, y)];
                                for w in 0..n {
                                    count += 1;
                                    let mut terms: Vec<(usize, Rational)> = Vec::new();
                                    for &(p, q, r) in &triple {
                                        let qr = self.basis_product(q, r);
                                        let pw = self.basis_product(p, w);
                                        terms.extend(mul(&unit(p), &mul(qr, &unit(w))));
                                        terms.extend(mul(qr, pw).into_iter().map(|(k, v)| (k, -v)));
                                    }
                                    let d = accumulate(terms);
                                    if !d.is_empty() {
                                        bad.push((vec![x, y, z, w], d));
                                    }
                                }
                            }
                        }
                        (count, bad)
                    })
                    .collect()
            }
            IdentityKind::PowerAssocLow => {
                // Full polarisations of a·a² = a²·a and a²·a² = (a²a)a.
                let perms3: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
                (0..n)
                    .into_par_iter()
                    .map(|x| {
                        let mut bad = Vec::new();
                        let mut count = 0;
                        for y in x..n {
                            for z in y..n {
                                count += 1;
                                let v = [x, y, z];
                                let mut terms = Vec::new();
                                for p in &perms3 {
                                    let (a, b, c) = (v[p[0]], v[p[1]], v[p[2]]);
                                    terms.extend(mul(self.basis_product(a, b), &unit(c)));
                                    terms.extend(mul(&unit(a), self.basis_product(b, c)).into_iter().map(|(k, q)| (k, -q)));
                                }
                                let d = accumulate(terms);
                                if !d.is_empty() {
                                    bad.push((vec![x, y, z], d));
                                }
                                for w in z..n {
                                    count += 1;
                                    let v = [x, y, z, w];
                                    let mut terms = Vec::new();
                                    for p in permutations4() {
                                        let (a, b, c, d) = (v[p[0]], v[p[1]], v[p[2]], v[p[3]]);
                                        let ab = self.basis_product(a, b);
                                        terms.extend(mul(ab, self.basis_product(c, d)));
                                        let abc = mul(ab, &unit(c));
                                        terms.extend(mul(&abc, &unit(d)).into_iter().map(|(k, q)| (k, -q)));
                                    }
                                    let dd = accumulate(terms);
                                    if !dd.is_empty() {
                                        bad.push((vec![x, y, z, w], dd));
                                    }
                                }
                            }
                        }
                        (count, bad)
                    })
                    .collect()
            }
        };

        let tuples_checked = per_outer.iter().map(|(c, _)| c).sum();
        let all_bad: Vec<_> = per_outer.into_iter().flat_map(|(_, b)| b).collect();
        let violations = all_bad.len();
        let witnesses = all_bad
            .into_iter()
            .take(MAX_WITNESSES)
            .map(|(tuple, r)| Witness { tuple, residual: r.into_iter().map(|(k, v)| (k, v.to_string())).collect() })
            .collect();
        IdentityReport { identity: kind, pass: violations == 0, tuples_checked, violations, witnesses }
    }

    /// First basis triple with nonzero associator, scanning lexicographically.
    pub fn first_nonassociative_triple(&self) -> Option<(usize, usize, usize)> {
        let n = self.dim;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let l = self.product_sparse(self.basis_product(i, j), &[(k, Rational::one())]);
                    let r = self.product_sparse(&[(i, Rational::one())], self.basis_product(j, k));
                    if l != r {
                        return Some((i, j, k));
                    }
                }
            }
        }
        None
    }
}

fn permutations4() -> impl Iterator<Item = [usize; 4]> {
    (0..4).flat_map(|a| {
        (0..4).flat_map(move |b| {
            (0..4).flat_map(move |c| {
                (0..4).filter_map(move |d| {
                    let p = [a, b, c, d];
                    let mut seen = [false; 4];
                    for &x in &p {
                        if seen[x] {
                            return None;
                        }
                        seen[x] = true;
                    }
                    Some(p)
                })
            })
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{int, rat};

    #[test]
    fn permutations_are_all_24() {
        assert_eq!(permutations4().count(), 24);
    }

    #[test]
    fn real_line_is_everything() {
        let r = real_line();
        for k in [IdentityKind::Jordan, IdentityKind::Associative, IdentityKind::Commutative, IdentityKind::PowerAssocLow] {
            assert!(r.check_identity(k).pass, "{k:?}");
        }
    }

    #[test]
    fn diagonal_algebra_is_associative() {
        let d = diagonal_algebra(2);
        assert!(d.check_identity(IdentityKind::Associative).pass);
        assert!(d.check_identity(IdentityKind::Jordan).pass);
    }

    #[test]
    fn matrix_algebra_is_not_commutative() {
        let m = matrix_algebra_2x2();
        assert!(m.check_identity(IdentityKind::Associative).pass);
        let c = m.check_identity(IdentityKind::Commutative);
        assert!(!c.pass);
        assert!(!m.check_identity(IdentityKind::Jordan).pass);
    }

    #[test]
    fn identity_axiom_is_enforced() {
        let bad = AlgebraSpec::new(
            2,
            vec!["a".into(), "b".into()],
            Some(vec![int(1), int(0)]),
            BTreeSet::new(),
            [(0, 0, 0, int(1)), (1, 1, 1, int(1))],
        );
        assert!(matches!(bad, Err(Error::IdentityAxiom(_))));
    }

    #[test]
    fn declared_commutativity_is_checked() {
        let bad = AlgebraSpec::new(
            2,
            vec!["a".into(), "b".into()],
            None,
            [Flag::Commutative].into_iter().collect(),
            [(0, 1, 1, int(1)), (1, 0, 1, rat(1, 2))],
        );
        assert!(matches!(bad, Err(Error::FlagViolated { .. })));
    }

    #[test]
    fn left_and_right_multiplication() {
        let m = matrix_algebra_2x2();
        let a = m.basis(1);
        let b = m.basis(2);
        let l = m.left_mult_operator(&a).unwrap();
        let r = m.right_mult_operator(&a).unwrap();
        assert_eq!(l.apply(&b).unwrap(), m.product(&a, &b).unwrap());
        assert_eq!(r.apply(&b).unwrap(), m.product(&b, &a).unwrap());
        assert!(m.product(&a, &[int(1)]).is_err());
    }

    #[test]
    fn direct_sum_keeps_factors_separate() {
        let d = diagonal_algebra(2);
        let s = d.direct_sum(&d, ("_1", "_2")).unwrap();
        assert_eq!(s.dim(), 4);
        assert!(s.basis_product(0, 2).is_empty());
        assert_eq!(s.identity().unwrap(), &[int(1); 4]);
        assert!(s.check_identity(IdentityKind::Associative).pass);
    }
}
