//! Integer-scaled sparse operators for fast exact identity sweeps.
//!
//! Every basis operator is stored as `d·π(eⁱ)` with one common denominator `d`,
//! and algebra elements as `tᵏ·x` with `t` the structure-constant denominator.
//! A monomial is then an integer matrix times a known power of `d` and `t`, so
//! identities can be checked in `i128` without any gcd work.

use num_integer::Integer;

use crate::algebra::AlgebraSpec;
use crate::operator::{LinearOperator, SparseVec};
use crate::Rational;

/// Algebra element as integer coefficients over the basis, implicitly scaled by `tᵏ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Combo {
    pub coeffs: Vec<(usize, i128)>,
    pub k: u32,
}

impl Combo {
    pub fn basis(i: usize) -> Self {
        Self { coeffs: vec![(i, 1)], k: 0 }
    }
}

pub struct Term {
    pub coeff: i128,
    pub factors: Vec<Combo>,
}

/// Integer structure constants `t·f^{ij}_k` of the Jordan product `½(ab + ba)`.
pub struct IntTable {
    pub dim: usize,
    pub t: i128,
    table: Vec<Vec<(usize, i128)>>,
}

fn lcm_of<'a>(vals: impl Iterator<Item = &'a Rational>) -> i64 {
    vals.fold(1i64, |acc, v| acc.lcm(v.denom()))
}

impl IntTable {
    pub fn jordan(alg: &AlgebraSpec) -> Self {
        let n = alg.dim();
        let half = Rational::new(1, 2);
        let sym: Vec<SparseVec> = (0..n * n)
            .map(|ij| {
                let (i, j) = (ij / n, ij % n);
                crate::operator::accumulate(
                    alg.basis_product(i, j).iter().chain(alg.basis_product(j, i)).map(|(k, v)| (*k, v * half)),
                )
            })
            .collect();
        Self::from_sparse(n, sym)
    }

    pub fn plain(alg: &AlgebraSpec) -> Self {
        let n = alg.dim();
        Self::from_sparse(n, (0..n * n).map(|ij| alg.basis_product(ij / n, ij % n).clone()).collect())
    }

    fn from_sparse(dim: usize, sym: Vec<SparseVec>) -> Self {
        let t = lcm_of(sym.iter().flatten().map(|(_, v)| v));
        let tr = Rational::from_integer(t);
        let table = sym
            .iter()
            .map(|row| row.iter().map(|(k, v)| (*k, (v * tr).to_integer() as i128)).collect())
            .collect();
        Self { dim, t: t as i128, table }
    }

    /// `a∘b` with scale `t^{k_a + k_b + 1}`.
    pub fn mul(&self, a: &Combo, b: &Combo) -> Combo {
        let mut acc: Vec<i128> = vec![0; self.dim];
        for (i, x) in &a.coeffs {
            for (j, y) in &b.coeffs {
                for (k, f) in &self.table[i * self.dim + j] {
                    acc[*k] += x * y * f;
                }
            }
        }
        Combo { coeffs: acc.into_iter().enumerate().filter(|(_, v)| *v != 0).collect(), k: a.k + b.k + 1 }
    }
}

/// `d·π(eⁱ)` for every basis element.
pub struct IntAction {
    pub dim: usize,
    pub d: i128,
    rows: Vec<Vec<Vec<(u32, i128)>>>,
}

impl IntAction {
    pub fn new(module_dim: usize, ops: &[LinearOperator]) -> Self {
        let d = lcm_of(ops.iter().flat_map(|o| o.data.iter().flatten().map(|(_, v)| v)));
        let dr = Rational::from_integer(d);
        let rows = ops
            .iter()
            .map(|o| {
                o.data
                    .iter()
                    .map(|row| row.iter().map(|(c, v)| (*c as u32, (v * dr).to_integer() as i128)).collect())
                    .collect()
            })
            .collect();
        Self { dim: module_dim, d: d as i128, rows }
    }
}

/// Evaluates `Σ terms` row by row with a dense scratch buffer.
pub struct Evaluator<'a> {
    action: &'a IntAction,
    table: &'a IntTable,
    scratch: Vec<i128>,
    next: Vec<i128>,
    touched: Vec<u32>,
    next_touched: Vec<u32>,
    next_mark: Vec<bool>,
    acc: Vec<i128>,
    acc_touched: Vec<u32>,
    acc_mark: Vec<bool>,
}

impl<'a> Evaluator<'a> {
    pub fn new(action: &'a IntAction, table: &'a IntTable) -> Self {
        let n = action.dim;
        Self {
            action,
            table,
            scratch: vec![0; n],
            next: vec![0; n],
            touched: Vec::new(),
            next_touched: Vec::new(),
            next_mark: vec![false; n],
            acc: vec![0; n],
            acc_touched: Vec::new(),
            acc_mark: vec![false; n],
        }
    }

    /// Scale of an integer monomial: `d^{#factors}·t^{Σk}`.
    fn exponents(term: &Term) -> (u32, u32) {
        (term.factors.len() as u32, term.factors.iter().map(|c| c.k).sum())
    }

    /// First nonzero entry of `Σ terms` as `(row, col, value)`, value in true units.
    pub fn first_nonzero(&mut self, terms: &[Term]) -> Option<(usize, usize, Rational)> {
        let (fmax, kmax) = terms.iter().map(Self::exponents).fold((0, 0), |(a, b), (f, k)| (a.max(f), b.max(k)));
        let mults: Vec<i128> = terms
            .iter()
            .map(|t| {
                let (f, k) = Self::exponents(t);
                t.coeff * self.action.d.pow(fmax - f) * self.table.t.pow(kmax - k)
            })
            .collect();
        let denom = self.action.d.pow(fmax) * self.table.t.pow(kmax);
        for r in 0..self.action.dim {
            for (term, m) in terms.iter().zip(&mults) {
                self.row_product(r, term, *m);
            }
            let mut hit = None;
            for &c in &self.acc_touched {
                let v = self.acc[c as usize];
                if v != 0 && hit.is_none_or(|(hc, _)| c < hc) {
                    hit = Some((c, v));
                }
            }
            for &c in &self.acc_touched {
                self.acc[c as usize] = 0;
                self.acc_mark[c as usize] = false;
            }
            self.acc_touched.clear();
            if let Some((c, v)) = hit {
                return Some((r, c as usize, Rational::new(v as i64, denom as i64)));
            }
        }
        None
    }

    /// `acc += m · (row r of the product of the term's factors)`.
    fn row_product(&mut self, r: usize, term: &Term, m: i128) {
        self.touched.clear();
        self.touched.push(r as u32);
        self.scratch[r] = 1;
        for combo in &term.factors {
            for &i in &self.touched {
                let x = self.scratch[i as usize];
                if x == 0 {
                    continue;
                }
                for (l, c) in &combo.coeffs {
                    for (col, v) in &self.action.rows[*l][i as usize] {
                        if !self.next_mark[*col as usize] {
                            self.next_mark[*col as usize] = true;
                            self.next_touched.push(*col);
                        }
                        self.next[*col as usize] += x * c * v;
                    }
                }
            }
            for &i in &self.touched {
                self.scratch[i as usize] = 0;
            }
            for &i in &self.next_touched {
                self.next_mark[i as usize] = false;
            }
            std::mem::swap(&mut self.scratch, &mut self.next);
            std::mem::swap(&mut self.touched, &mut self.next_touched);
            self.next_touched.clear();
        }
        for &c in &self.touched {
            let v = self.scratch[c as usize];
            self.scratch[c as usize] = 0;
            if v != 0 {
                if !self.acc_mark[c as usize] {
                    self.acc_mark[c as usize] = true;
                    self.acc_touched.push(c);
                }
                self.acc[c as usize] += m * v;
            }
        }
        self.touched.clear();
    }
}
