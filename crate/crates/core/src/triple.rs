//! The finite spectral triple `(⊕ⁿJ₃(𝕆), J₃(𝕆)⊗ℝⁿ, D)`.
//!
//! `H` is ordered block by block: coordinate `(a − 1)·27 + i` is `e^i` in the
//! `a`-th copy. The Dirac operator is parametrised by one 27×27 coefficient
//! matrix `M` per pair of points `a < b`:
//!
//! ```text
//! D_{ab} = Σ M^{ij} e_i ⊗ e_j^*  = M·G,      D_{ba} = Σ M^{ij} e_j ⊗ e_i^* = Mᵀ·G,
//! ```
//!
//! where `e_j^* = ⟨e_j|·⟩` and `G` is the Gram matrix of `(1/3)Tr[a∘b]`. Every
//! such `D` is symmetric in the inner product, so no Hermiticity rows are needed.

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::{build_j3o, j3o_gram, AlgebraSpec, DIAGONAL};
use crate::derivations::{full_sectors, inner_derivation_span, universal_delta_images};
use crate::error::{Error, Result};
use crate::linalg::{
    primitive_row, rank_of_span, rank_of_span_mod_p, solve_kernel_certified, span_closure, span_closure_in,
    KernelCertificate, PrimeField, RowDeduper, SolveOptions, SparseMatrix, PRIMES,
};
use crate::modules::{build_split_bimodule, direct_power, ModuleAction};
use crate::operator::{accumulate, LinearOperator, SparseVec};
use crate::{from_big, rat, to_big, Rational};

const B: usize = 27;

/// `H = J₃(𝕆) ⊗ ℝⁿ` with `π(a) = diag(S_{a₁}, …, S_{aₙ})`.
#[derive(Clone, Debug)]
pub struct TwoPointRep {
    points: usize,
    base: AlgebraSpec,
    action: ModuleAction,
    base_gram: LinearOperator,
    gram: LinearOperator,
}

/// The two-point representation.
pub fn build_two_point_rep() -> Result<TwoPointRep> {
    build_point_rep(2)
}

/// `n`-point representation with `⟨h|v⟩ = (1/n) Σ_a ⟨h_a|v_a⟩`.
pub fn build_point_rep(points: usize) -> Result<TwoPointRep> {
    let base = build_j3o();
    let algebra = direct_power(&base, points)?;
    let zero = LinearOperator::zeros(B, B);
    let s = base.left_mult_basis();
    let ops = (0..points)
        .flat_map(|a| {
            let (s, zero) = (&s, &zero);
            (0..B).map(move |i| {
                let blocks: Vec<&LinearOperator> = (0..points).map(|b| if a == b { &s[i] } else { zero }).collect();
                LinearOperator::direct_sum(&blocks)
            })
        })
        .collect();
    let action = ModuleAction::new(algebra, B * points, ops)?;
    let base_gram = j3o_gram(&base)?;
    let scaled = base_gram.scale(rat(1, points as i64));
    let gram = LinearOperator::direct_sum(&vec![&scaled; points]);
    Ok(TwoPointRep { points, base, action, base_gram, gram })
}

impl TwoPointRep {
    pub fn points(&self) -> usize {
        self.points
    }

    pub fn hilbert_dim(&self) -> usize {
        B * self.points
    }

    pub fn base(&self) -> &AlgebraSpec {
        &self.base
    }

    pub fn algebra(&self) -> &AlgebraSpec {
        self.action.algebra()
    }

    pub fn action(&self) -> &ModuleAction {
        &self.action
    }

    /// Gram matrix of `(1/3)Tr[a∘b]` on one copy of `J₃(𝕆)`.
    pub fn base_gram(&self) -> &LinearOperator {
        &self.base_gram
    }

    pub fn gram(&self) -> &LinearOperator {
        &self.gram
    }

    /// `π(a)` for an arbitrary element.
    pub fn pi(&self, a: &[Rational]) -> Result<LinearOperator> {
        self.action.op(a)
    }

    /// `Gπ(a) = π(a)ᵀG`, i.e. `⟨π(a)h|v⟩ = ⟨h|π(a)v⟩`.
    pub fn is_symmetric(&self, op: &LinearOperator) -> Result<bool> {
        Ok(self.gram.compose(op)? == op.transpose().compose(&self.gram)?)
    }

    /// First basis element whose action is not symmetric.
    pub fn first_asymmetric_basis(&self) -> Result<Option<usize>> {
        for (i, op) in self.action.basis_ops().iter().enumerate() {
            if !self.is_symmetric(op)? {
                return Ok(Some(i));
            }
        }
        Ok(None)
    }

    fn pairs(&self) -> Vec<(usize, usize)> {
        point_pairs(self.points)
    }
}

fn point_pairs(n: usize) -> Vec<(usize, usize)> {
    (1..=n).flat_map(|a| (a + 1..=n).map(move |b| (a, b))).collect()
}

/// Identity of `J₃(𝕆)` as `e^0 = e^1 + e^10 + e^19`.
fn identity_outer() -> LinearOperator {
    LinearOperator::from_triplets(B, B, DIAGONAL.iter().flat_map(|&p| DIAGONAL.iter().map(move |&q| (p, q, Rational::one()))))
}

/// `D` stored as one coefficient matrix `M` per pair of points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiracOperator {
    points: usize,
    coefficients: Vec<((usize, usize), LinearOperator)>,
}

#[derive(Clone, Debug, Serialize)]
pub struct DiracSummary {
    pub points: usize,
    /// `((a, b), [(i, j, M^{ij})])`, 0-based `i, j` on the e-basis.
    pub coefficients: Vec<((usize, usize), Vec<(usize, usize, String)>)>,
    /// Common κ when every block is `κ e₀⊗e₀*`.
    pub kappa: Option<String>,
}

impl DiracOperator {
    pub fn new(points: usize, coefficients: Vec<((usize, usize), LinearOperator)>) -> Result<Self> {
        for ((a, b), m) in &coefficients {
            if !(1 <= *a && a < b && *b <= points) {
                return Err(Error::InvalidArgument(format!("no pair of points ({a}, {b}) among {points}")));
            }
            if m.rows != B || m.cols != B {
                return Err(Error::DimensionMismatch { expected: B, got: m.rows.max(m.cols) });
            }
        }
        let mut coefficients = coefficients;
        coefficients.sort_by_key(|(p, _)| *p);
        Ok(Self { points, coefficients })
    }

    pub fn zero(points: usize) -> Self {
        Self { points, coefficients: Vec::new() }
    }

    /// `κ e₀⊗e₀*` between every pair of points.
    pub fn standard(points: usize, kappa: Rational) -> Self {
        let m = identity_outer().scale(kappa);
        Self { points, coefficients: point_pairs(points).into_iter().map(|p| (p, m.clone())).collect() }
    }

    /// A single coefficient `M^{ij} = 1` between points 1 and 2.
    pub fn single_coefficient(i: usize, j: usize) -> Result<Self> {
        if i >= B || j >= B {
            return Err(Error::InvalidArgument(format!("coefficient ({i}, {j}) out of range")));
        }
        Self::new(2, vec![((1, 2), LinearOperator::from_triplets(B, B, [(i, j, Rational::one())]))])
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn coefficients(&self) -> &[((usize, usize), LinearOperator)] {
        &self.coefficients
    }

    pub fn kappa(&self) -> Option<Rational> {
        let e = identity_outer();
        let pairs = point_pairs(self.points);
        if self.coefficients.len() != pairs.len() {
            return None;
        }
        let k = self.coefficients.first()?.1.get(0, 0);
        let scaled = e.scale(k);
        self.coefficients.iter().all(|(_, m)| *m == scaled).then_some(k)
    }

    pub fn summary(&self) -> DiracSummary {
        DiracSummary {
            points: self.points,
            coefficients: self
                .coefficients
                .iter()
                .map(|(p, m)| (*p, m.triplets().map(|(i, j, x)| (i, j, x.to_string())).collect()))
                .collect(),
            kappa: self.kappa().map(|k| k.to_string()),
        }
    }

    /// The full `27n × 27n` operator on `H`.
    pub fn operator(&self, rep: &TwoPointRep) -> Result<LinearOperator> {
        if rep.points != self.points {
            return Err(Error::DimensionMismatch { expected: rep.points, got: self.points });
        }
        let g = rep.base_gram();
        let mut trip = Vec::new();
        for ((a, b), m) in &self.coefficients {
            let (oa, ob) = ((a - 1) * B, (b - 1) * B);
            trip.extend(m.compose(g)?.triplets().map(|(r, c, x)| (oa + r, ob + c, x)));
            trip.extend(m.transpose().compose(g)?.triplets().map(|(r, c, x)| (ob + r, oa + c, x)));
        }
        Ok(LinearOperator::from_triplets(rep.hilbert_dim(), rep.hilbert_dim(), trip))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DiracProvenance {
    pub points: usize,
    pub unknowns: usize,
    /// All ordered basis pairs `(a, b)` of `⊕ⁿJ₃(𝕆)`.
    pub basis_pairs: usize,
    /// Pairs with `π(ab) ≠ π(a)π(b)`; the rest contribute nothing.
    pub nonzero_pairs: usize,
    pub rows_offered: usize,
    pub zero_rows: usize,
    pub duplicate_rows: usize,
    pub rows: usize,
    pub nnz: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct DiracSolution {
    pub provenance: DiracProvenance,
    pub kernel_dim: usize,
    pub certificate: KernelCertificate,
    /// One κ per pair of points.
    pub parametrization: Vec<String>,
    /// Every kernel element is `κ e₀⊗e₀*` on each pair.
    pub identity_pattern: bool,
    /// `⋆` is operator composition; the constraint is `[D, π(ab)] = [D, π(a)π(b)]`
    /// expanded from the representation and the ansatz for `D`.
    pub product: String,
    #[serde(skip)]
    pub basis: Vec<DiracOperator>,
}

/// Dense 27×27 for the inner loops.
fn dense(op: &LinearOperator) -> Vec<Rational> {
    op.to_dense()
}

/// Constraint rows of `[D, X] = 0` for `X = diag(…, X_a, …)` supported on block `a`.
/// Column of `M_P[k][l]` is `P·729 + k·27 + l`.
fn dirac_rows(x: &[Rational], gx: &[Rational], g: &[Rational], a: usize, pairs: &[(usize, usize)]) -> Vec<Option<Vec<(u32, i64)>>> {
    let mut out = Vec::new();
    let mut e: Vec<(usize, Rational)> = Vec::new();
    for (pi, &(p, q)) in pairs.iter().enumerate() {
        if a != p && a != q {
            continue;
        }
        let off = pi * B * B;
        let col = |k: usize, l: usize| off + k * B + l;
        for r in 0..B {
            for c in 0..B {
                // block (p, q): −X·M·G if a = p, M·G·X if a = q
                e.clear();
                if a == p {
                    for k in 0..B {
                        let xv = x[r * B + k];
                        if xv.is_zero() {
                            continue;
                        }
                        for l in 0..B {
                            let gv = g[l * B + c];
                            if !gv.is_zero() {
                                e.push((col(k, l), -(xv * gv)));
                            }
                        }
                    }
                } else {
                    for k in 0..B {
                        let v = gx[k * B + c];
                        if !v.is_zero() {
                            e.push((col(r, k), v));
                        }
                    }
                }
                out.push(primitive_row(&e));
                // block (q, p): Mᵀ·G·X if a = p, −X·Mᵀ·G if a = q
                e.clear();
                if a == p {
                    for k in 0..B {
                        let v = gx[k * B + c];
                        if !v.is_zero() {
                            e.push((col(k, r), v));
                        }
                    }
                } else {
                    for k in 0..B {
                        let xv = x[r * B + k];
                        if xv.is_zero() {
                            continue;
                        }
                        for l in 0..B {
                            let gv = g[l * B + c];
                            if !gv.is_zero() {
                                e.push((col(l, k), -(xv * gv)));
                            }
                        }
                    }
                }
                out.push(primitive_row(&e));
            }
        }
    }
    out
}

/// Solve `[D, π(ab)] = [D, π(a)π(b)]` for all basis pairs over the coefficient
/// matrices of `D`, with `κ e₀⊗e₀*` per pair as candidate kernel.
pub fn solve_dirac_constraints(rep: &TwoPointRep) -> Result<DiracSolution> {
    let pairs = rep.pairs();
    if pairs.is_empty() {
        return Err(Error::InvalidArgument("a Dirac operator needs at least two points".into()));
    }
    let base = rep.base();
    let s = base.left_mult_basis();
    let g = dense(rep.base_gram());
    let gop = rep.base_gram().clone();
    // X_{ij} = S_{e^i∘e^j} − S_i S_j on one copy; pairs across copies give X = 0.
    let xs: Vec<(Vec<Rational>, Vec<Rational>)> = (0..B * B)
        .into_par_iter()
        .map(|ij| {
            let (i, j) = (ij / B, ij % B);
            let mut sij = LinearOperator::zeros(B, B);
            for (k, f) in base.basis_product(i, j) {
                sij = sij.lincomb(Rational::one(), &s[*k], *f).expect("square");
            }
            let x = sij.sub(&s[i].compose(&s[j]).expect("square")).expect("square");
            let gx = gop.compose(&x).expect("square");
            (dense(&x), dense(&gx))
        })
        .filter(|(x, _)| x.iter().any(|v| !v.is_zero()))
        .collect();
    let n = rep.points;
    let cols = pairs.len() * B * B;
    let mut dedup = RowDeduper::new(cols);
    for a in 1..=n {
        let rows: Vec<Vec<Option<Vec<(u32, i64)>>>> =
            xs.par_iter().map(|(x, gx)| dirac_rows(x, gx, &g, a, &pairs)).collect();
        for r in rows.into_iter().flatten() {
            dedup.offer_prepared(r);
        }
    }
    let (offered, zero_rows, duplicate_rows) = (dedup.offered, dedup.zero_rows, dedup.duplicates);
    let matrix: SparseMatrix = dedup.finish();
    let e = identity_outer();
    let cands: Vec<Vec<(usize, crate::BigQ)>> = (0..pairs.len())
        .map(|pi| e.triplets().map(|(k, l, x)| (pi * B * B + k * B + l, to_big(&x))).collect())
        .collect();
    let cert = solve_kernel_certified(&matrix, &cands, &SolveOptions::default())?;
    if !cert.conclusive {
        return Err(Error::Inconclusive { lower: cert.kernel_dim_bounds.0, upper: cert.kernel_dim_bounds.1 });
    }
    let mut basis = Vec::new();
    for v in &cert.kernel_basis {
        let mut per: Vec<Vec<(usize, usize, Rational)>> = vec![Vec::new(); pairs.len()];
        for (c, x) in v {
            let x = from_big(x).ok_or_else(|| Error::InvalidArgument("kernel entry exceeds 64 bits".into()))?;
            per[c / (B * B)].push(((c % (B * B)) / B, c % B, x));
        }
        let coeffs = per
            .into_iter()
            .enumerate()
            .filter(|(_, t)| !t.is_empty())
            .map(|(pi, t)| (pairs[pi], LinearOperator::from_triplets(B, B, t)))
            .collect();
        basis.push(DiracOperator::new(n, coeffs)?);
    }
    let identity_pattern = basis.iter().all(|d| {
        d.coefficients.iter().all(|(_, m)| {
            let k = m.get(DIAGONAL[0], DIAGONAL[0]);
            !k.is_zero() && *m == e.scale(k)
        })
    });
    Ok(DiracSolution {
        provenance: DiracProvenance {
            points: n,
            unknowns: cols,
            basis_pairs: (B * n) * (B * n),
            nonzero_pairs: xs.len() * n,
            rows_offered: offered,
            zero_rows,
            duplicate_rows,
            rows: matrix.nrows(),
            nnz: matrix.nnz(),
        },
        kernel_dim: cert.kernel_dim(),
        certificate: cert,
        parametrization: pairs.iter().map(|(a, b)| format!("kappa_({a}{b})")).collect(),
        identity_pattern,
        product: "operator composition".into(),
        basis,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct DiracWitness {
    pub a: String,
    pub b: String,
    pub entry: (usize, usize),
    pub value: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct DiracLeibnizReport {
    pub pairs_checked: usize,
    pub violations: usize,
    /// Violation with the largest entry in absolute value.
    pub max_violation: Option<DiracWitness>,
    pub pass: bool,
}

/// `[D, π(ab)] = [D, π(a)]π(b) + π(a)[D, π(b)]` on every basis pair.
pub fn check_leibniz_for_dirac(d: &DiracOperator, rep: &TwoPointRep) -> Result<DiracLeibnizReport> {
    let dop = d.operator(rep)?;
    let alg = rep.algebra();
    let n = alg.dim();
    let pis = rep.action.basis_ops();
    let comms: Vec<LinearOperator> = pis.iter().map(|p| dop.commutator(p)).collect::<Result<_>>()?;
    let found: Vec<Option<(Rational, DiracWitness)>> = (0..n * n)
        .into_par_iter()
        .map(|ab| -> Result<Option<(Rational, DiracWitness)>> {
            let (a, b) = (ab / n, ab % n);
            let mut prod = LinearOperator::zeros(rep.hilbert_dim(), rep.hilbert_dim());
            for (k, f) in alg.basis_product(a, b) {
                prod = prod.lincomb(Rational::one(), &pis[*k], *f)?;
            }
            let lhs = dop.commutator(&prod)?;
            let rhs = comms[a].compose(&pis[b])?.add(&pis[a].compose(&comms[b])?)?;
            let diff = lhs.sub(&rhs)?;
            Ok(diff.triplets().max_by(|x, y| x.2.abs().cmp(&y.2.abs())).map(|(r, c, v)| {
                let names = alg.basis_names();
                (v.abs(), DiracWitness { a: names[a].clone(), b: names[b].clone(), entry: (r, c), value: v.to_string() })
            }))
        })
        .collect::<Result<_>>()?;
    let violations = found.iter().filter(|w| w.is_some()).count();
    let max_violation = found.into_iter().flatten().fold(None::<(Rational, DiracWitness)>, |best, w| match best {
        Some(b) if b.0 >= w.0 => Some(b),
        _ => Some(w),
    });
    Ok(DiracLeibnizReport { pairs_checked: n * n, violations, max_violation: max_violation.map(|w| w.1), pass: violations == 0 })
}

/// `γ = diag(+1, −1, +1, …)` blockwise.
pub fn grading(rep: &TwoPointRep) -> LinearOperator {
    LinearOperator::from_triplets(
        rep.hilbert_dim(),
        rep.hilbert_dim(),
        (0..rep.hilbert_dim()).map(|i| (i, i, if (i / B) % 2 == 0 { Rational::one() } else { -Rational::one() })),
    )
}

#[derive(Clone, Debug, Serialize)]
pub struct GradingReport {
    pub gamma_squared_identity: bool,
    pub commutes_with_algebra: bool,
    pub anticommutes_with_dirac: bool,
    pub pass: bool,
}

pub fn check_grading(d: &DiracOperator, rep: &TwoPointRep) -> Result<GradingReport> {
    let g = grading(rep);
    let dop = d.operator(rep)?;
    let gamma_squared_identity = g.compose(&g)? == LinearOperator::identity(rep.hilbert_dim());
    let mut commutes_with_algebra = true;
    for p in rep.action.basis_ops() {
        commutes_with_algebra &= g.commutator(p)?.is_zero();
    }
    let anticommutes_with_dirac = g.compose(&dop)?.add(&dop.compose(&g)?)?.is_zero();
    Ok(GradingReport {
        gamma_squared_identity,
        commutes_with_algebra,
        anticommutes_with_dirac,
        pass: gamma_squared_identity && commutes_with_algebra && anticommutes_with_dirac,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct InnerSymmetryReport {
    pub inner_derivation_dim: usize,
    /// Index into the inner-derivation basis of the first `δ` with `[D, δ] ≠ 0`.
    pub first_failure: Option<usize>,
    pub pass: bool,
}

fn unflatten(dim: usize, v: &SparseVec) -> LinearOperator {
    LinearOperator::from_triplets(dim, dim, v.iter().map(|(i, x)| (i / dim, i % dim, *x)))
}

/// `[D, δ] = 0` for a basis of the span of `δ_{a,b} = [π(a), π(b)]`.
pub fn check_inner_symmetries(d: &DiracOperator, rep: &TwoPointRep) -> Result<InnerSymmetryReport> {
    let dop = d.operator(rep)?;
    let span = inner_derivation_span(&rep.action, false)?;
    let mut first_failure = None;
    for (i, v) in span.basis.iter().enumerate() {
        if !dop.commutator(&unflatten(rep.hilbert_dim(), v))?.is_zero() {
            first_failure = Some(i);
            break;
        }
    }
    Ok(InnerSymmetryReport { inner_derivation_dim: span.dim, first_failure, pass: first_failure.is_none() })
}

#[derive(Clone, Debug, Serialize)]
pub struct ConnesOneFormReport {
    /// Off-diagonal operator coordinates, `27²·n(n−1)`.
    pub ambient_dim: usize,
    pub dim: usize,
    pub exact: bool,
    pub field: String,
    pub seed_count: usize,
    /// Seeds and multipliers leave the diagonal blocks at zero.
    pub diagonal_blocks_vanish: bool,
    /// `dim` of the closure projected onto block `(a, b)`, divided by `27²`:
    /// the multiplicity `dim V^{ab}`.
    pub sector_dims: Vec<((usize, usize), usize)>,
    pub generator_applications: usize,
}

/// Coordinates of off-diagonal blocks, in row-major order of the full operator.
fn off_diagonal_coords(points: usize) -> (Vec<Option<usize>>, Vec<usize>) {
    let h = B * points;
    let mut fwd = vec![None; h * h];
    let mut back = Vec::new();
    for r in 0..h {
        for c in 0..h {
            if r / B != c / B {
                fwd[r * h + c] = Some(back.len());
                back.push(r * h + c);
            }
        }
    }
    (fwd, back)
}

/// Connes 1-forms `Σ π(a)[D, π(b)]`: span of `[D, π(e^α)]` closed under
/// composition with `π(e^β)` on either side.
pub fn generate_connes_oneforms(d: &DiracOperator, rep: &TwoPointRep) -> Result<ConnesOneFormReport> {
    let dop = d.operator(rep)?;
    let h = rep.hilbert_dim();
    let (fwd, back) = off_diagonal_coords(rep.points);
    let ambient = back.len();
    let pis = rep.action.basis_ops();
    let mut diagonal_blocks_vanish = pis.iter().all(|p| p.triplets().all(|(r, c, _)| r / B == c / B));
    let mut seeds = Vec::new();
    for p in pis {
        let c = dop.commutator(p)?;
        let mut v = Vec::new();
        for (r, col, x) in c.triplets() {
            match fwd[r * h + col] {
                Some(i) => v.push((i, x)),
                None => diagonal_blocks_vanish = false,
            }
        }
        seeds.push(accumulate(v));
    }
    if !diagonal_blocks_vanish {
        return Err(Error::InvalidArgument("Dirac operator has diagonal blocks".into()));
    }
    // Left: (XY)[r][c] = Σ_k X[r][k] Y[k][c]. Right: (YX)[r][c] = Σ_k Y[r][k] X[k][c].
    let mut generators = Vec::with_capacity(2 * pis.len());
    for x in pis {
        let xt = x.transpose();
        let mut left = Vec::new();
        let mut right = Vec::new();
        for (i, &flat) in back.iter().enumerate() {
            let (r, c) = (flat / h, flat % h);
            for (k, v) in &x.data[r] {
                left.push((i, fwd[k * h + c].expect("block-diagonal multiplier"), *v));
            }
            for (k, v) in &xt.data[c] {
                right.push((i, fwd[r * h + k].expect("block-diagonal multiplier"), *v));
            }
        }
        generators.push(LinearOperator::from_triplets(ambient, ambient, left));
        generators.push(LinearOperator::from_triplets(ambient, ambient, right));
    }
    let f = PrimeField::new(PRIMES[0])?;
    let mut r = span_closure_in(&f, ambient, &seeds, &generators, None)?;
    if !r.exact {
        r = span_closure(ambient, &seeds, &generators)?;
    }
    let mut sector_dims = Vec::new();
    for a in 1..=rep.points {
        for b in 1..=rep.points {
            if a == b {
                continue;
            }
            let proj: Vec<SparseVec> = r
                .basis
                .iter()
                .map(|v| {
                    v.iter()
                        .filter(|(i, _)| {
                            let flat = back[*i];
                            (flat / h) / B == a - 1 && (flat % h) / B == b - 1
                        })
                        .cloned()
                        .collect()
                })
                .collect();
            let rank = if r.exact && r.dim == ambient { rank_of_span_mod_p(&proj, PRIMES[0])? } else { rank_of_span(&proj) };
            sector_dims.push(((a, b), rank / (B * B)));
        }
    }
    Ok(ConnesOneFormReport {
        ambient_dim: ambient,
        dim: r.dim,
        exact: r.exact,
        field: r.field,
        seed_count: seeds.len(),
        diagonal_blocks_vanish,
        sector_dims,
        generator_applications: r.generator_applications,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct DiracHomReport {
    pub universal_dim: usize,
    /// `Γ_{ab}` on sector `(a, b)`.
    pub gamma: Vec<((usize, usize), String)>,
    /// `Γ_{ab} = Γ_{ba}` on every off-diagonal pair.
    pub off_diagonal_equal: bool,
    pub kernel_sector_dims: Vec<((usize, usize), usize)>,
    pub image_sector_dims: Vec<((usize, usize), usize)>,
    pub kernel_dim: usize,
    /// `φ(Δ[e^α]) = [D, π(e^α)]` for every basis element.
    pub matches_dirac_on_generators: bool,
    /// `φ∘π_L(a) = π(a)∘φ` and `φ∘π_R(a) = φ(·)∘π(a)` on every basis element.
    pub intertwining_verified: bool,
    pub sector_preserving: bool,
}

/// The bimodule map `π: Ω¹_d A → Ω¹_D A`, `d[a] ↦ [D, π(a)]`, on the universal
/// 1-forms `J₃(𝕆) ⊗ ℝ^{n²} ⊗ J₃(𝕆)`. It is sought in the sector-preserving
/// form `h ⊗^{ab} k ↦ Γ_{ab} · E_{ab} ⊗ h kᵀG` and `Γ` is solved for exactly.
pub fn dirac_as_hom(d: &DiracOperator, rep: &TwoPointRep) -> Result<DiracHomReport> {
    let n = rep.points;
    let h = rep.hilbert_dim();
    let module = build_split_bimodule(n, &full_sectors(n))?;
    let md = module.module_dim();
    let vd = module.v_dim();
    let sectors = module.sectors().to_vec();
    let g = rep.base_gram();
    let dop = d.operator(rep)?;
    let pis = rep.action.basis_ops();

    // ι(h ⊗^{s} k) in flattened operator coordinates, without Γ.
    let iota = |idx: usize| -> (usize, SparseVec) {
        let (hh, v, k) = module.split_index(idx);
        let (a, b) = sectors[v];
        let row = (a - 1) * B + hh;
        let out = g.data[k].iter().map(|(l, x)| (row * h + (b - 1) * B + l, *x)).collect();
        (v, out)
    };
    let deltas = universal_delta_images(&module)?;
    // Σ_s Γ_s u_s(α) = [D, π(e^α)]; augmented column holds −rhs.
    let ns = sectors.len();
    let mut sys = SparseMatrix::new(ns + 1);
    for (alpha, delta) in deltas.iter().enumerate() {
        let mut per: Vec<Vec<(usize, Rational)>> = vec![Vec::new(); ns];
        for (idx, x) in delta {
            let (s, img) = iota(*idx);
            per[s].extend(img.into_iter().map(|(c, y)| (c, x * y)));
        }
        let per: Vec<SparseVec> = per.into_iter().map(accumulate).collect();
        let rhs = dop.commutator(&pis[alpha])?.flatten();
        let mut rows: std::collections::BTreeMap<usize, Vec<(usize, Rational)>> = Default::default();
        for (s, v) in per.iter().enumerate() {
            for (c, x) in v {
                rows.entry(*c).or_default().push((s, *x));
            }
        }
        for (c, x) in &rhs {
            rows.entry(*c).or_default().push((ns, -*x));
        }
        for (_, r) in rows {
            sys.push_row(r);
        }
    }
    let cert = solve_kernel_certified(&sys, &[], &SolveOptions { exact_limit: usize::MAX, ..SolveOptions::default() })?;
    let sol = cert
        .kernel_basis
        .iter()
        .find(|v| v.iter().any(|(c, _)| *c == ns))
        .ok_or_else(|| Error::NotIntertwining("[D, π(a)] is not the image of a sector-preserving map".into()))?;
    let last = sol.iter().find(|(c, _)| *c == ns).map(|(_, x)| x.clone()).expect("present");
    let mut gamma = vec![Rational::zero(); ns];
    for (c, x) in sol {
        if *c < ns {
            gamma[*c] = from_big(&(x / &last)).ok_or_else(|| Error::InvalidArgument("Γ exceeds 64 bits".into()))?;
        }
    }
    // Γ is unique iff the sector images are independent.
    if cert.kernel_dim() != 1 {
        return Err(Error::NotIntertwining(format!("Γ is not unique: solution space of dimension {}", cert.kernel_dim())));
    }

    let phi = LinearOperator::from_triplets(
        h * h,
        md,
        (0..md).flat_map(|idx| {
            let (s, img) = iota(idx);
            let gs = gamma[s];
            img.into_iter().filter(move |_| !gs.is_zero()).map(move |(r, x)| (r, idx, gs * x))
        }),
    );
    let id = LinearOperator::identity(h);
    let mut intertwining = true;
    for (alpha, p) in pis.iter().enumerate() {
        let left_t = p.kron(&id);
        let right_t = id.kron(&p.transpose());
        intertwining &= phi.compose(module.left().basis_op(alpha))? == left_t.compose(&phi)?;
        intertwining &= phi.compose(module.right().basis_op(alpha))? == right_t.compose(&phi)?;
    }
    let pt = phi.transpose();
    let mut matches = true;
    for (alpha, delta) in deltas.iter().enumerate() {
        matches &= LinearOperator::apply_sparse_with_transpose(&pt, delta) == dop.commutator(&pis[alpha])?.flatten();
    }

    let mut kernel_sector_dims = Vec::new();
    let mut image_sector_dims = Vec::new();
    let per_sector = md / vd;
    for (s, sector) in sectors.iter().enumerate() {
        let images: Vec<SparseVec> = (0..md)
            .filter(|&idx| module.split_index(idx).1 == s)
            .map(|idx| LinearOperator::apply_sparse_with_transpose(&pt, &[(idx, Rational::one())]))
            .collect();
        let rank = rank_of_span(&images);
        kernel_sector_dims.push((*sector, per_sector - rank));
        image_sector_dims.push((*sector, rank));
    }
    let kernel_dim = kernel_sector_dims.iter().map(|(_, k)| k).sum();
    let lookup = |a: usize, b: usize| sectors.iter().position(|s| *s == (a, b)).map(|i| gamma[i]);
    let off_diagonal_equal = point_pairs(n).iter().all(|&(a, b)| lookup(a, b) == lookup(b, a));
    Ok(DiracHomReport {
        universal_dim: md,
        gamma: sectors.iter().zip(&gamma).map(|(s, g)| (*s, g.to_string())).collect(),
        off_diagonal_equal,
        kernel_sector_dims: kernel_sector_dims.into_iter().filter(|(_, k)| *k > 0).collect(),
        image_sector_dims: image_sector_dims.into_iter().filter(|(_, k)| *k > 0).collect(),
        kernel_dim,
        matches_dirac_on_generators: matches,
        intertwining_verified: intertwining,
        sector_preserving: true,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct TripleReport {
    pub dirac: DiracSummary,
    pub representation_symmetric: bool,
    pub dirac_symmetric: bool,
    pub leibniz: DiracLeibnizReport,
    pub grading: GradingReport,
    pub inner_symmetries: InnerSymmetryReport,
    pub oneforms: ConnesOneFormReport,
    pub pass: bool,
}

/// All compatibility checks for `D = κ e₀⊗e₀*` on two points.
pub fn check_triple(kappa: Rational) -> Result<TripleReport> {
    let rep = build_two_point_rep()?;
    let d = if kappa.is_zero() { DiracOperator::zero(2) } else { DiracOperator::standard(2, kappa) };
    let representation_symmetric = rep.first_asymmetric_basis()?.is_none();
    let dirac_symmetric = rep.is_symmetric(&d.operator(&rep)?)?;
    let leibniz = check_leibniz_for_dirac(&d, &rep)?;
    let grading = check_grading(&d, &rep)?;
    let inner_symmetries = check_inner_symmetries(&d, &rep)?;
    let oneforms = generate_connes_oneforms(&d, &rep)?;
    let pass = representation_symmetric && dirac_symmetric && leibniz.pass && grading.pass && inner_symmetries.pass && oneforms.diagonal_blocks_vanish;
    Ok(TripleReport { dirac: d.summary(), representation_symmetric, dirac_symmetric, leibniz, grading, inner_symmetries, oneforms, pass })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::int;

    #[test]
    fn representation_basics() {
        let rep = build_two_point_rep().unwrap();
        assert_eq!(rep.hilbert_dim(), 54);
        let one = rep.algebra().identity().unwrap().to_vec();
        assert_eq!(rep.pi(&one).unwrap(), LinearOperator::identity(54));
        let mut first = one.clone();
        first[27..].iter_mut().for_each(|x| *x = Rational::zero());
        let p = rep.pi(&first).unwrap();
        assert_eq!(p.compose(&p).unwrap(), p);
        assert_eq!(p.trace(), int(27));
        assert_eq!(rep.first_asymmetric_basis().unwrap(), None);
    }

    #[test]
    fn standard_dirac_is_symmetric_and_graded() {
        let rep = build_two_point_rep().unwrap();
        let d = DiracOperator::standard(2, rat(3, 2));
        assert_eq!(d.kappa(), Some(rat(3, 2)));
        assert!(rep.is_symmetric(&d.operator(&rep).unwrap()).unwrap());
        assert!(check_grading(&d, &rep).unwrap().pass);
        let bad = DiracOperator::single_coefficient(0, 1).unwrap();
        assert!(rep.is_symmetric(&bad.operator(&rep).unwrap()).unwrap());
        assert_eq!(bad.kappa(), None);
    }

    #[test]
    fn leibniz_separates_identity_coefficient() {
        let rep = build_two_point_rep().unwrap();
        assert!(check_leibniz_for_dirac(&DiracOperator::standard(2, int(1)), &rep).unwrap().pass);
        assert!(check_leibniz_for_dirac(&DiracOperator::zero(2), &rep).unwrap().pass);
        let r = check_leibniz_for_dirac(&DiracOperator::single_coefficient(0, 0).unwrap(), &rep).unwrap();
        assert!(!r.pass);
        assert!(r.max_violation.is_some());
    }

    #[test]
    fn zero_dirac_generates_nothing() {
        let rep = build_two_point_rep().unwrap();
        let r = generate_connes_oneforms(&DiracOperator::zero(2), &rep).unwrap();
        assert_eq!(r.dim, 0);
        assert_eq!(r.ambient_dim, 1458);
    }

    #[test]
    fn one_point_has_no_dirac() {
        let rep = build_point_rep(1).unwrap();
        assert!(solve_dirac_constraints(&rep).is_err());
    }
}
