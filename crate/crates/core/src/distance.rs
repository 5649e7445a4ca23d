//! States, commutator norms and the Connes distance between the two points.
//!
//! Everything here is floating point. Operator norms are taken in the Hilbert
//! structure of `H`: with `G` diagonal, `‖C‖ = ‖W C W⁻¹‖₂` for `W = G^{1/2}`.

use std::cell::RefCell;

use argmin::core::{CostFunction, Executor, Gradient};
use argmin::solver::linesearch::MoreThuenteLineSearch;
use argmin::solver::quasinewton::BFGS;
use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::jordan_trace;
use crate::error::{Error, Result};
use crate::operator::LinearOperator;
use crate::triple::{build_two_point_rep, DiracOperator, TwoPointRep};
use crate::Rational;

const BLOCK: usize = 27;

/// Relative Rayleigh-residual target for the power iteration.
pub const NORM_TOLERANCE: f64 = 1e-9;
pub const DISTANCE_TOLERANCE: f64 = 1e-6;
pub const DEFAULT_STARTS: usize = 32;
pub const DEFAULT_SEED: u64 = 0x5eed_2024;

fn to_f64(q: &Rational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

/// `ρ(b) = ⟨s|b⟩` for a representing element `s`, normalised to `ρ(e⁰) = 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StateFunctional {
    /// The idempotent placed in its factor, before normalisation.
    support: Vec<Rational>,
    element: Vec<Rational>,
    weights: Vec<Rational>,
}

impl StateFunctional {
    /// State represented by `element`, rescaled so that `ρ(e⁰) = 1`.
    pub fn from_element(rep: &TwoPointRep, element: &[Rational]) -> Result<Self> {
        let one = rep.algebra().identity().expect("unital").to_vec();
        let raw = gram_apply(rep.gram(), element)?;
        let at_one: Rational = raw.iter().zip(&one).map(|(w, e)| w * e).sum();
        if at_one.is_zero() {
            return Err(Error::InvalidArgument("element gives ρ(e⁰) = 0 and cannot be normalised".into()));
        }
        Ok(Self {
            support: element.to_vec(),
            element: element.iter().map(|x| x / at_one).collect(),
            weights: raw.iter().map(|x| x / at_one).collect(),
        })
    }

    pub fn element(&self) -> &[Rational] {
        &self.element
    }

    pub fn support(&self) -> &[Rational] {
        &self.support
    }

    pub fn evaluate(&self, b: &[Rational]) -> Result<Rational> {
        if b.len() != self.weights.len() {
            return Err(Error::DimensionMismatch { expected: self.weights.len(), got: b.len() });
        }
        Ok(self.weights.iter().zip(b).map(|(w, x)| w * x).sum())
    }

    pub fn weights_f64(&self) -> Vec<f64> {
        self.weights.iter().map(to_f64).collect()
    }

    /// `ρ(b∘b) ≥ 0` on `samples` random integer elements.
    pub fn positive_on_squares(&self, rep: &TwoPointRep, samples: usize, seed: u64) -> Result<bool> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let alg = rep.algebra();
        for _ in 0..samples {
            let b: Vec<Rational> = (0..alg.dim()).map(|_| Rational::from_integer(rng.gen_range(-5..=5))).collect();
            if self.evaluate(&alg.product(&b, &b)?)? < Rational::zero() {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

fn gram_apply(g: &LinearOperator, v: &[Rational]) -> Result<Vec<Rational>> {
    g.transpose().apply(v)
}

/// Pure state of a primitive idempotent `p` placed on factor `factor` (1-based).
pub fn pure_state(rep: &TwoPointRep, factor: usize, idempotent: &[Rational]) -> Result<StateFunctional> {
    if factor == 0 || factor > rep.points() {
        return Err(Error::InvalidArgument(format!("factor {factor} out of range 1..={}", rep.points())));
    }
    if idempotent.len() != BLOCK {
        return Err(Error::DimensionMismatch { expected: BLOCK, got: idempotent.len() });
    }
    if rep.base().product(idempotent, idempotent)? != idempotent {
        return Err(Error::NotIdempotent("p∘p ≠ p".into()));
    }
    let tr = jordan_trace(idempotent)?;
    if tr != Rational::from_integer(1) {
        return Err(Error::NotIdempotent(format!("Tr[p] = {tr}, expected 1")));
    }
    let mut element = vec![Rational::zero(); rep.hilbert_dim()];
    element[(factor - 1) * BLOCK..factor * BLOCK].clone_from_slice(idempotent);
    StateFunctional::from_element(rep, &element)
}

#[derive(Clone, Debug, Serialize)]
pub struct NormEstimate {
    pub norm: f64,
    /// Interval containing an eigenvalue of `C†C`, from the Rayleigh residual.
    pub eigenvalue_band: (f64, f64),
    pub residual: f64,
    pub iterations: usize,
    /// The power-iteration eigenvalue agrees with a dense symmetric eigensolver.
    pub cross_checked: bool,
}

const POWER_CAP: usize = 1_000_000;

fn power_norm(k: &DMatrix<f64>, tol: f64) -> Result<NormEstimate> {
    let a = k.transpose() * k;
    let n = a.nrows();
    let top = SymmetricEigen::new(a.clone()).eigenvalues.max();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut v = DVector::from_fn(n, |_, _| rng.gen_range(-1.0..1.0));
    v /= v.norm();
    let mut residual = f64::INFINITY;
    for it in 1..=POWER_CAP {
        let w = &a * &v;
        let wn = w.norm();
        if wn == 0.0 {
            return Ok(NormEstimate { norm: 0.0, eigenvalue_band: (0.0, 0.0), residual: 0.0, iterations: it, cross_checked: top.abs() <= 1e-12 });
        }
        let lambda = v.dot(&w);
        residual = (&w - lambda * &v).norm();
        if residual <= tol * lambda.abs() {
            let band = ((lambda - residual).max(0.0), lambda + residual);
            let cross_checked = (top - lambda).abs() <= residual + 1e-10 * top.abs().max(1.0);
            return Ok(NormEstimate { norm: lambda.max(0.0).sqrt(), eigenvalue_band: band, residual, iterations: it, cross_checked });
        }
        v = w / wn;
    }
    Err(Error::NoConvergence { residual })
}

/// `W [D, π(e^j)] W⁻¹` for every basis element, so that `‖[D, π(a)]‖ = ‖Σ aⱼ Kⱼ‖₂`.
struct NormEngine {
    h: usize,
    basis: Vec<DMatrix<f64>>,
    /// Orthonormal basis of `{a : [D, π(a)] = 0}`.
    kernel: Vec<DVector<f64>>,
}

impl NormEngine {
    fn new(d: &DiracOperator, rep: &TwoPointRep) -> Result<Self> {
        let h = rep.hilbert_dim();
        let w = gram_sqrt(rep)?;
        let dop = d.operator(rep)?;
        let basis = rep
            .action()
            .basis_ops()
            .iter()
            .map(|p| Ok(scaled(&dop.commutator(p)?, &w)))
            .collect::<Result<Vec<DMatrix<f64>>>>()?;
        let n = basis.len();
        let flat = DMatrix::from_fn(h * h, n, |r, c| basis[c][(r / h, r % h)]);
        let svd = flat.svd(false, true);
        let vt = svd.v_t.expect("requested");
        let smax = svd.singular_values.max();
        let kernel = (0..n)
            .filter(|&i| svd.singular_values[i] <= 1e-10 * smax.max(f64::MIN_POSITIVE))
            .map(|i| vt.row(i).transpose())
            .chain((svd.singular_values.len()..n).map(|i| vt.row(i).transpose()))
            .collect();
        Ok(Self { h, basis, kernel })
    }

    /// Remove the component of `a` along the kernel.
    fn project(&self, a: &mut [f64]) {
        for z in &self.kernel {
            let c: f64 = z.iter().zip(a.iter()).map(|(x, y)| x * y).sum();
            a.iter_mut().zip(z.iter()).for_each(|(y, x)| *y -= c * x);
        }
    }

    fn matrix(&self, a: &[f64]) -> DMatrix<f64> {
        let mut k: DMatrix<f64> = DMatrix::zeros(self.h, self.h);
        for (x, kj) in a.iter().zip(&self.basis) {
            if *x != 0.0 {
                k += kj * *x;
            }
        }
        k
    }

    fn norm(&self, a: &[f64]) -> f64 {
        let k = self.matrix(a);
        SymmetricEigen::new(k.transpose() * &k).eigenvalues.max().max(0.0).sqrt()
    }
}

fn gram_sqrt(rep: &TwoPointRep) -> Result<Vec<f64>> {
    let g = rep.gram();
    let mut w = vec![0.0; g.rows];
    for (r, c, x) in g.triplets() {
        if r != c {
            return Err(Error::InvalidArgument("operator norms need a diagonal Gram matrix".into()));
        }
        w[r] = to_f64(&x).sqrt();
    }
    Ok(w)
}

fn scaled(c: &LinearOperator, w: &[f64]) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(c.rows, c.cols);
    for (r, col, x) in c.triplets() {
        m[(r, col)] = w[r] * to_f64(&x) / w[col];
    }
    m
}

/// `‖[D, π(a)]‖` by power iteration on `C†C`.
pub fn commutator_norm(d: &DiracOperator, rep: &TwoPointRep, a: &[Rational]) -> Result<NormEstimate> {
    if a.len() != rep.algebra().dim() {
        return Err(Error::DimensionMismatch { expected: rep.algebra().dim(), got: a.len() });
    }
    let c = d.operator(rep)?.commutator(&rep.pi(a)?)?;
    power_norm(&scaled(&c, &gram_sqrt(rep)?), NORM_TOLERANCE)
}

#[derive(Clone, Debug)]
pub struct DistanceQuery {
    pub rep: TwoPointRep,
    pub dirac: DiracOperator,
    pub state_x: StateFunctional,
    pub state_y: StateFunctional,
    pub tolerance: f64,
    pub starts: usize,
    pub seed: u64,
}

impl DistanceQuery {
    /// `x = pure(1, e¹)`, `y = pure(2, e¹)` and `D = κ e₀⊗e₀*`.
    pub fn two_point(kappa: Rational) -> Result<Self> {
        let rep = build_two_point_rep()?;
        let p = crate::algebra::primitive_idempotents_standard()[0].clone();
        let state_x = pure_state(&rep, 1, &p)?;
        let state_y = pure_state(&rep, 2, &p)?;
        let dirac = if kappa.is_zero() { DiracOperator::zero(2) } else { DiracOperator::standard(2, kappa) };
        Ok(Self { rep, dirac, state_x, state_y, tolerance: DISTANCE_TOLERANCE, starts: DEFAULT_STARTS, seed: DEFAULT_SEED })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ReducedPath {
    /// Supremum over `a = α·p_x + β·p_y` only.
    pub distance: f64,
    pub alpha: f64,
    pub beta: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct NumericalPath {
    pub distance: f64,
    pub starts: usize,
    pub seed: u64,
    pub best_start: usize,
    /// Smallest value reached by any start.
    pub worst_start_distance: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct PathsAgreement {
    pub agree: bool,
    /// Numerical minus reduced; positive values mean the reduction is not optimal.
    pub difference: f64,
}

/// The formula `‖[D, π(αe¹, βe¹)]‖ = max{κα, κβ, κ(α − β)}` against
/// the measured norm.
#[derive(Clone, Debug, Serialize)]
pub struct MaxNormFormula {
    pub samples: usize,
    pub holds_on_positive_orthant: bool,
    pub holds_elsewhere: bool,
    /// `(α, β, measured, formula)` at `α = 1, β = 0`.
    pub example: (f64, f64, f64, f64),
}

#[derive(Clone, Debug, Serialize)]
pub struct DistanceReport {
    pub kappa: Option<String>,
    pub tolerance: f64,
    pub distance: f64,
    pub maximizer: Vec<f64>,
    pub norm_at_max: NormEstimate,
    pub tight_at_max: bool,
    pub closed_form: ReducedPath,
    pub numerical: NumericalPath,
    pub paths_agreement: PathsAgreement,
    /// `1/κ`, the value usually quoted for the two-point geometry.
    pub inverse_kappa: Option<f64>,
    pub matches_inverse_kappa: Option<bool>,
    pub max_norm_formula: Option<MaxNormFormula>,
    /// `2√2/|κ|` for the standard Dirac operator between the two pure states:
    /// compressing to the span of `e⁰` and `p` turns the supremum into a 2×2
    /// nuclear-norm dual.
    pub analytic_supremum: Option<f64>,
    pub matches_analytic: Option<bool>,
    /// Tight, both paths agree, and the value is `1/κ`.
    pub pass: bool,
}

/// Cost `−f(a)/N_μ(a)` with a smoothed, degree-one homogeneous norm
/// `N_μ² = T·log Σ exp(λᵢ/T)`, `T = μ·tr(KᵀK)`, over the eigenvalues `λᵢ` of `KᵀK`.
struct SmoothRatio<'a> {
    engine: &'a NormEngine,
    w: &'a [f64],
    mu: f64,
    cache: RefCell<Option<(Vec<f64>, f64, Vec<f64>)>>,
}

impl SmoothRatio<'_> {
    fn eval(&self, a: &[f64]) -> (f64, Vec<f64>) {
        if let Some((p, c, g)) = self.cache.borrow().as_ref() {
            if p == a {
                return (*c, g.clone());
            }
        }
        let out = self.compute(a);
        *self.cache.borrow_mut() = Some((a.to_vec(), out.0, out.1.clone()));
        out
    }

    fn compute(&self, a: &[f64]) -> (f64, Vec<f64>) {
        let n = a.len();
        let k = self.engine.matrix(a);
        let ata = k.transpose() * &k;
        let tr = ata.trace();
        if tr <= 0.0 {
            return (0.0, vec![0.0; n]);
        }
        let t = self.mu * tr;
        let eig = SymmetricEigen::new(ata);
        let lmax = eig.eigenvalues.max();
        let e: Vec<f64> = eig.eigenvalues.iter().map(|l| ((l - lmax) / t).exp()).collect();
        let s: f64 = e.iter().sum();
        let f2 = lmax + t * s.ln();
        let entropy = s.ln() + eig.eigenvalues.iter().zip(&e).map(|(l, x)| x / s * (lmax - l) / t).sum::<f64>();
        let mut df = vec![0.0; n];
        for (i, x) in e.iter().enumerate() {
            let p = x / s;
            if p < 1e-18 {
                continue;
            }
            let v = eig.eigenvectors.column(i);
            let u = &k * v;
            for (j, kj) in self.engine.basis.iter().enumerate() {
                df[j] += p * 2.0 * u.dot(&(kj * v));
            }
        }
        for (j, kj) in self.engine.basis.iter().enumerate() {
            df[j] += entropy * self.mu * 2.0 * k.dot(kj);
        }
        let nrm = f2.sqrt();
        let f: f64 = self.w.iter().zip(a).map(|(w, x)| w * x).sum();
        let ratio = f / nrm;
        let grad: Vec<f64> = (0..n).map(|j| -(self.w[j] / nrm - f * df[j] / (2.0 * nrm * nrm * nrm))).collect();
        (-ratio, grad)
    }
}

impl CostFunction for SmoothRatio<'_> {
    type Param = Vec<f64>;
    type Output = f64;
    fn cost(&self, a: &Self::Param) -> std::result::Result<f64, argmin::core::Error> {
        Ok(self.eval(a).0)
    }
}

impl Gradient for SmoothRatio<'_> {
    type Param = Vec<f64>;
    type Gradient = Vec<f64>;
    fn gradient(&self, a: &Self::Param) -> std::result::Result<Vec<f64>, argmin::core::Error> {
        Ok(self.eval(a).1)
    }
}

const MU_SCHEDULE: [f64; 5] = [1e-2, 1e-4, 1e-6, 1e-9, 1e-12];
const STAGE_ITERS: u64 = 80;

fn ratio(engine: &NormEngine, w: &[f64], a: &[f64]) -> f64 {
    let n = engine.norm(a);
    if n == 0.0 {
        return 0.0;
    }
    w.iter().zip(a).map(|(x, y)| x * y).sum::<f64>() / n
}

/// One start of the ascent: BFGS on the smoothed ratio, with the smoothing
/// tightened stage by stage; iterates are renormalised to `‖[D, π(a)]‖ = 1`.
fn ascend(engine: &NormEngine, w: &[f64], start: Vec<f64>) -> (f64, Vec<f64>) {
    let normalise = |mut a: Vec<f64>| -> Vec<f64> {
        engine.project(&mut a);
        let n = engine.norm(&a);
        if n > 0.0 {
            a.into_iter().map(|x| x / n).collect()
        } else {
            a
        }
    };
    let mut a = normalise(start);
    let mut best = (ratio(engine, w, &a), a.clone());
    for mu in MU_SCHEDULE {
        let problem = SmoothRatio { engine, w, mu, cache: RefCell::new(None) };
        let n = a.len();
        let inv: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
        let solver = BFGS::new(MoreThuenteLineSearch::new()).with_tolerance_grad(1e-13).and_then(|s| s.with_tolerance_cost(1e-16));
        let Ok(solver) = solver else { break };
        let res = Executor::new(problem, solver).configure(|st| st.param(a.clone()).inv_hessian(inv).max_iters(STAGE_ITERS)).run();
        if let Ok(res) = res {
            if let Some(p) = res.state().best_param.clone() {
                let cand = normalise(p);
                let r = ratio(engine, w, &cand);
                if r.is_finite() && r > best.0 {
                    best = (r, cand.clone());
                }
                a = cand;
            }
        }
    }
    best
}

fn reduced_path(engine: &NormEngine, w: &[f64], ux: &[f64], uy: &[f64]) -> (f64, f64, f64) {
    let at = |theta: f64| -> (f64, Vec<f64>) {
        let (al, be) = (theta.cos(), theta.sin());
        let a: Vec<f64> = ux.iter().zip(uy).map(|(x, y)| al * x + be * y).collect();
        (ratio(engine, w, &a).abs(), a)
    };
    let scan = 4000;
    let step = std::f64::consts::PI / scan as f64;
    let mut best = (0.0, 0.0);
    for i in 0..scan {
        let th = i as f64 * step;
        let r = at(th).0;
        if r > best.0 {
            best = (r, th);
        }
    }
    // golden-section refinement on the bracketing cell
    let (mut lo, mut hi) = (best.1 - step, best.1 + step);
    let g = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..200 {
        let m1 = hi - g * (hi - lo);
        let m2 = lo + g * (hi - lo);
        if at(m1).0 < at(m2).0 {
            lo = m1;
        } else {
            hi = m2;
        }
        if hi - lo < 1e-15 {
            break;
        }
    }
    let th = 0.5 * (lo + hi);
    let (r, a) = at(th);
    let n = engine.norm(&a);
    let sign = if ratio(engine, w, &a) < 0.0 { -1.0 } else { 1.0 };
    (r, sign * th.cos() / n, sign * th.sin() / n)
}

fn max_formula(engine: &NormEngine, ux: &[f64], uy: &[f64], kappa: f64) -> MaxNormFormula {
    let grid = [-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0];
    let (mut pos, mut other, mut samples) = (true, true, 0);
    let measure = |al: f64, be: f64| {
        let a: Vec<f64> = ux.iter().zip(uy).map(|(x, y)| al * x + be * y).collect();
        engine.norm(&a)
    };
    for &al in &grid {
        for &be in &grid {
            if al == 0.0 && be == 0.0 {
                continue;
            }
            samples += 1;
            let claimed = (kappa * al).max(kappa * be).max(kappa * (al - be));
            let ok = (measure(al, be) - claimed).abs() <= 1e-9 * claimed.abs().max(1.0);
            if al >= 0.0 && be >= 0.0 {
                pos &= ok;
            } else {
                other &= ok;
            }
        }
    }
    MaxNormFormula {
        samples,
        holds_on_positive_orthant: pos,
        holds_elsewhere: other,
        example: (1.0, 0.0, measure(1.0, 0.0), kappa),
    }
}

/// `d(x, y) = sup{|ρ_x(a) − ρ_y(a)| : ‖[D, π(a)]‖ ≤ 1}` along two paths: the
/// reduction `a = α p_x + β p_y`, and BFGS ascent over all of `A` from
/// `query.starts` seeded random starts.
pub fn connes_distance(query: &DistanceQuery) -> Result<DistanceReport> {
    if query.dirac.coefficients().iter().all(|(_, m)| m.is_zero()) {
        return Err(Error::DegenerateDirac);
    }
    if !(query.tolerance > 0.0) {
        return Err(Error::InvalidArgument("tolerance must be positive".into()));
    }
    if query.starts == 0 {
        return Err(Error::InvalidArgument("at least one start is required".into()));
    }
    let engine = NormEngine::new(&query.dirac, &query.rep)?;
    let wx = query.state_x.weights_f64();
    let wy = query.state_y.weights_f64();
    let w: Vec<f64> = wx.iter().zip(&wy).map(|(a, b)| a - b).collect();
    // An element separating the states while commuting with D leaves the supremum unbounded.
    let wn = w.iter().map(|x| x * x).sum::<f64>().sqrt();
    if engine.kernel.iter().any(|z| z.iter().zip(&w).map(|(x, y)| x * y).sum::<f64>().abs() > 1e-9 * wn) {
        return Err(Error::DegenerateDirac);
    }
    let ux: Vec<f64> = query.state_x.support().iter().map(to_f64).collect();
    let uy: Vec<f64> = query.state_y.support().iter().map(to_f64).collect();
    let (reduced, alpha, beta) = reduced_path(&engine, &w, &ux, &uy);
    let reduced_a: Vec<f64> = ux.iter().zip(&uy).map(|(x, y)| alpha * x + beta * y).collect();

    let dim = w.len();
    let results: Vec<(f64, Vec<f64>)> = (0..query.starts)
        .into_par_iter()
        .map(|s| {
            let mut rng = ChaCha8Rng::seed_from_u64(query.seed.wrapping_add(s as u64));
            let mut a: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
            if w.iter().zip(&a).map(|(x, y)| x * y).sum::<f64>() < 0.0 {
                a.iter_mut().for_each(|x| *x = -*x);
            }
            ascend(&engine, &w, a)
        })
        .collect();
    let (best_start, (numeric, numeric_a)) = results
        .iter()
        .enumerate()
        .fold((0, (f64::NEG_INFINITY, Vec::new())), |acc, (i, r)| if r.0 > acc.1 .0 { (i, r.clone()) } else { acc });
    let worst = results.iter().map(|r| r.0).fold(f64::INFINITY, f64::min);

    let (distance, maximizer) = if numeric > reduced { (numeric, numeric_a) } else { (reduced, reduced_a) };
    let k = engine.matrix(&maximizer);
    let norm_at_max = power_norm(&k, NORM_TOLERANCE)?;
    let kappa = query.dirac.kappa();
    let kf = kappa.as_ref().map(to_f64);
    let inverse_kappa = kf.map(|k| 1.0 / k.abs());
    let analytic_supremum = kf.map(|k| 2.0 * std::f64::consts::SQRT_2 / k.abs());
    let tight_at_max = (norm_at_max.norm - 1.0).abs() <= query.tolerance;
    let agree = (numeric - reduced).abs() <= query.tolerance;
    let matches_inverse_kappa = inverse_kappa.map(|ik| (distance - ik).abs() <= query.tolerance);
    Ok(DistanceReport {
        kappa: kappa.map(|k| k.to_string()),
        tolerance: query.tolerance,
        distance,
        tight_at_max,
        norm_at_max,
        maximizer,
        closed_form: ReducedPath { distance: reduced, alpha, beta },
        numerical: NumericalPath { distance: numeric, starts: query.starts, seed: query.seed, best_start, worst_start_distance: worst },
        paths_agreement: PathsAgreement { agree, difference: numeric - reduced },
        matches_inverse_kappa,
        inverse_kappa,
        max_norm_formula: kf.map(|k| max_formula(&engine, &ux, &uy, k)),
        matches_analytic: analytic_supremum.map(|s| (distance - s).abs() <= query.tolerance),
        analytic_supremum,
        pass: tight_at_max && agree && matches_inverse_kappa.unwrap_or(false),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::primitive_idempotents_standard;
    use crate::{int, rat};

    fn setup() -> (TwoPointRep, StateFunctional, StateFunctional) {
        let rep = build_two_point_rep().unwrap();
        let p = primitive_idempotents_standard()[0].clone();
        let x = pure_state(&rep, 1, &p).unwrap();
        let y = pure_state(&rep, 2, &p).unwrap();
        (rep, x, y)
    }

    #[test]
    fn pure_states_are_normalised() {
        let (rep, x, y) = setup();
        let mut first = vec![Rational::zero(); 54];
        for d in crate::algebra::DIAGONAL {
            first[d] = int(1);
        }
        assert_eq!(x.evaluate(&first).unwrap(), int(1));
        let mut second = vec![Rational::zero(); 54];
        second[27 + 5] = int(7);
        second[27] = int(3);
        assert_eq!(x.evaluate(&second).unwrap(), int(0));
        // a = (αe¹, βe¹) separates the states by α − β
        let mut a = vec![Rational::zero(); 54];
        a[0] = rat(5, 2);
        a[27] = int(-1);
        assert_eq!(x.evaluate(&a).unwrap() - y.evaluate(&a).unwrap(), rat(7, 2));
        assert!(x.positive_on_squares(&rep, 20, 3).unwrap());
    }

    #[test]
    fn non_idempotent_rejected() {
        let rep = build_two_point_rep().unwrap();
        let mut p = vec![Rational::zero(); 27];
        p[0] = int(2);
        assert!(matches!(pure_state(&rep, 1, &p), Err(Error::NotIdempotent(_))));
        let e0: Vec<Rational> = rep.base().identity().unwrap().to_vec();
        assert!(matches!(pure_state(&rep, 1, &e0), Err(Error::NotIdempotent(_))));
    }

    #[test]
    fn commutator_norms() {
        let (rep, _, _) = setup();
        let d = DiracOperator::standard(2, int(1));
        let one = rep.algebra().identity().unwrap().to_vec();
        assert_eq!(commutator_norm(&d, &rep, &one).unwrap().norm, 0.0);
        let mut a = vec![Rational::zero(); 54];
        a[0] = int(1);
        let n1 = commutator_norm(&d, &rep, &a).unwrap();
        // ‖e₀ (Ge¹)ᵀ‖ in the trace metric: ‖ê₀‖·‖ê¹‖ = 1/√3
        assert!((n1.norm - 1.0 / 3f64.sqrt()).abs() < 1e-9, "{n1:?}");
        assert!(n1.cross_checked);
        let a2: Vec<Rational> = a.iter().map(|x| x * int(2)).collect();
        let n2 = commutator_norm(&d, &rep, &a2).unwrap();
        assert!((n2.norm - 2.0 * n1.norm).abs() < 1e-9);
    }

    #[test]
    fn zero_kappa_is_degenerate() {
        let q = DistanceQuery::two_point(int(0)).unwrap();
        assert!(matches!(connes_distance(&q), Err(Error::DegenerateDirac)));
    }

    #[test]
    fn reduced_path_matches_its_closed_form() {
        // Along (αe¹, βe¹): sup |α − β| / ‖·‖ = 3(√3 − 1)/κ.
        let mut q = DistanceQuery::two_point(int(2)).unwrap();
        q.starts = 1;
        let r = connes_distance(&q).unwrap();
        let expected = 3.0 * (3f64.sqrt() - 1.0) / 2.0;
        assert!((r.closed_form.distance - expected).abs() < 1e-9, "{:?}", r.closed_form);
    }
}
