//! Kernels with modular rank certificates.
//!
//! For an integer matrix, rank mod p never exceeds rank over ℚ, so
//! `cols − rank_p` bounds the rational kernel dimension from above. An exhibited
//! set of independent rational kernel vectors bounds it from below; the
//! certificate is conclusive when the two meet.

use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;

use super::echelon::Echelon;
use super::field::{Field, PrimeField, RationalField, PRIMES};
use super::sparse::{Component, SparseMatrix};
use crate::error::{Error, Result};
use crate::{to_big, BigQ, Rational};

pub type SparseBigVec = Vec<(usize, BigQ)>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModKernel {
    pub prime: u64,
    pub rank: usize,
    pub basis: Vec<Vec<u64>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KernelCertificate {
    pub rows: usize,
    pub cols: usize,
    #[serde(skip)]
    pub kernel_basis: Vec<SparseBigVec>,
    pub primes: Vec<u64>,
    pub ranks_mod_p: Vec<usize>,
    pub kernel_dim_bounds: (usize, usize),
    pub rank_over_q_bounds: (usize, usize),
    pub components: usize,
    pub conclusive: bool,
}

impl KernelCertificate {
    pub fn kernel_dim(&self) -> usize {
        self.kernel_dim_bounds.0
    }

    pub fn require_conclusive(self) -> Result<Self> {
        if self.conclusive {
            Ok(self)
        } else {
            Err(Error::Inconclusive { lower: self.kernel_dim_bounds.0, upper: self.kernel_dim_bounds.1 })
        }
    }
}

#[derive(Clone, Debug)]
pub struct SolveOptions {
    pub primes: Vec<u64>,
    /// Components with at most this many columns get a full kernel over ℚ;
    /// larger ones rely on the supplied candidates for the lower bound.
    pub exact_limit: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self { primes: PRIMES[..2].to_vec(), exact_limit: 5000 }
    }
}

/// Columns ordered by how many rows touch them (fewest first), ties by index.
fn markowitz_order(rows: &[Vec<(usize, Rational)>], ncols: usize) -> Vec<usize> {
    let mut count = vec![0usize; ncols];
    for r in rows {
        for (c, _) in r {
            count[*c] += 1;
        }
    }
    let mut order: Vec<usize> = (0..ncols).collect();
    order.sort_by_key(|&c| (count[c], c));
    order
}

fn to_field_row<F: Field>(f: &F, row: &[(usize, Rational)]) -> Result<Vec<(usize, F::Elem)>> {
    row.iter().map(|(c, v)| Ok((*c, f.from_rational(v)?))).collect()
}

/// Rank of `rows` mod p, stopping once `target` is reached. Returns the rank
/// and the indices of rows that produced pivots.
fn rank_mod_p(rows: &[Vec<(usize, Rational)>], ncols: usize, order: &[usize], p: u64, target: Option<usize>) -> Result<(usize, Vec<usize>)> {
    let f = PrimeField::new(p)?;
    let mut e = Echelon::new(&f, ncols, Some(order.to_vec()));
    let mut used = Vec::new();
    for (i, r) in rows.iter().enumerate() {
        if target.is_some_and(|t| e.rank() >= t) {
            break;
        }
        if e.insert(to_field_row(&f, r)?) {
            used.push(i);
        }
    }
    Ok((e.rank(), used))
}

fn exact_kernel(rows: &[&Vec<(usize, Rational)>], ncols: usize, order: &[usize]) -> Vec<Vec<BigQ>> {
    let f = RationalField;
    let mut e = Echelon::new(&f, ncols, Some(order.to_vec()));
    for r in rows {
        e.insert(r.iter().map(|(c, v)| (*c, to_big(v))));
    }
    e.kernel_basis()
}

fn vanishes(rows: &[Vec<(usize, Rational)>], v: &[BigQ]) -> bool {
    rows.iter().all(|r| {
        let mut acc = BigQ::zero();
        for (c, a) in r {
            if !v[*c].is_zero() {
                acc += to_big(a) * &v[*c];
            }
        }
        acc.is_zero()
    })
}

struct ComponentResult {
    basis: Vec<SparseBigVec>,
    ranks: Vec<usize>,
}

fn solve_component(m: &SparseMatrix, comp: &Component, candidates: &[SparseBigVec], opts: &SolveOptions) -> Result<ComponentResult> {
    let ncols = comp.cols.len();
    let local = |g: usize| comp.cols.binary_search(&g).ok();
    let mut rows: Vec<Vec<(usize, Rational)>> = comp
        .rows
        .iter()
        .map(|&r| m.row_entries(r).map(|(c, v)| (local(c).expect("row inside component"), v)).collect())
        .collect();
    rows.sort_by_key(|r: &Vec<(usize, Rational)>| r.len());
    let order = markowitz_order(&rows, ncols);
    let globalise = |v: Vec<BigQ>| -> SparseBigVec {
        v.into_iter().enumerate().filter(|(_, x)| !x.is_zero()).map(|(i, x)| (comp.cols[i], x)).collect()
    };

    let mut ranks = vec![0usize; opts.primes.len()];
    let basis: Vec<SparseBigVec>;
    if ncols <= opts.exact_limit {
        let (r1, used) = rank_mod_p(&rows, ncols, &order, opts.primes[0], None)?;
        ranks[0] = r1;
        let selected: Vec<&Vec<(usize, Rational)>> = used.iter().map(|&i| &rows[i]).collect();
        let mut kernel = exact_kernel(&selected, ncols, &order);
        if !kernel.iter().all(|v| vanishes(&rows, v)) {
            // The prime lost rank; eliminate every row over ℚ instead.
            let all: Vec<&Vec<(usize, Rational)>> = rows.iter().collect();
            kernel = exact_kernel(&all, ncols, &order);
        }
        basis = kernel.into_iter().map(globalise).collect();
    } else {
        let f = RationalField;
        let mut e = Echelon::new(&f, ncols, None);
        let mut kept = Vec::new();
        for cand in candidates {
            let proj: Vec<(usize, BigQ)> = cand.iter().filter_map(|(c, x)| local(*c).map(|l| (l, x.clone()))).collect();
            if proj.is_empty() {
                continue;
            }
            if e.insert(proj.clone()) {
                kept.push(proj.into_iter().map(|(l, x)| (comp.cols[l], x)).collect());
            }
        }
        basis = kept;
    }
    let target = ncols - basis.len();
    for (k, &p) in opts.primes.iter().enumerate() {
        if k == 0 && ncols <= opts.exact_limit {
            continue;
        }
        ranks[k] = rank_mod_p(&rows, ncols, &order, p, Some(target))?.0;
    }
    Ok(ComponentResult { basis, ranks })
}

fn check_candidates(m: &SparseMatrix, candidates: &[SparseBigVec]) -> Result<()> {
    for (i, v) in candidates.iter().enumerate() {
        if let Some((row, value)) = m.first_violation(v)? {
            return Err(Error::NotInKernel { index: i, row, value: value.to_string() });
        }
    }
    Ok(())
}

/// Kernel of `m` with a modular certificate. Candidate vectors must lie in the
/// kernel; they supply the lower bound on components too large to solve over ℚ.
pub fn solve_kernel(m: &SparseMatrix, candidates: &[SparseBigVec], opts: &SolveOptions) -> Result<KernelCertificate> {
    if opts.primes.is_empty() {
        return Err(Error::InvalidArgument("at least one prime is required".into()));
    }
    check_candidates(m, candidates)?;
    let comps = m.components();
    let results: Vec<ComponentResult> = comps
        .par_iter()
        .map(|c| solve_component(m, c, candidates, opts))
        .collect::<Result<Vec<_>>>()?;
    let mut basis: Vec<SparseBigVec> = m
        .unused_columns()
        .into_iter()
        .map(|c| vec![(c, BigQ::from_integer(1.into()))])
        .collect();
    let mut ranks = vec![0usize; opts.primes.len()];
    for r in results {
        basis.extend(r.basis);
        for (acc, x) in ranks.iter_mut().zip(r.ranks) {
            *acc += x;
        }
    }
    basis.sort_by(|a, b| a.first().map(|x| x.0).cmp(&b.first().map(|x| x.0)));
    check_candidates(m, &basis)?;
    let cols = m.ncols();
    let lower = basis.len();
    let max_rank = ranks.iter().copied().max().unwrap_or(0);
    let upper = cols - max_rank;
    Ok(KernelCertificate {
        rows: m.nrows(),
        cols,
        kernel_basis: basis,
        primes: opts.primes.clone(),
        ranks_mod_p: ranks,
        kernel_dim_bounds: (lower, upper),
        rank_over_q_bounds: (cols - upper, cols - lower),
        components: comps.len(),
        conclusive: lower == upper,
    })
}

/// As [`solve_kernel`], retrying with the reserve prime when inconclusive.
pub fn solve_kernel_certified(m: &SparseMatrix, candidates: &[SparseBigVec], opts: &SolveOptions) -> Result<KernelCertificate> {
    let cert = solve_kernel(m, candidates, opts)?;
    if cert.conclusive {
        return Ok(cert);
    }
    let mut more = opts.clone();
    for p in PRIMES {
        if !more.primes.contains(&p) {
            more.primes.push(p);
        }
    }
    solve_kernel(m, candidates, &more)
}

/// Verify candidates and certify the kernel dimension from ranks mod two or
/// more primes, without solving for a kernel over ℚ.
pub fn certify_kernel(m: &SparseMatrix, candidates: &[SparseBigVec]) -> Result<KernelCertificate> {
    let opts = SolveOptions { exact_limit: 0, ..SolveOptions::default() };
    solve_kernel(m, candidates, &opts)
}

/// Rank and kernel basis of `m` over ℤ/p.
pub fn kernel_mod_p(m: &SparseMatrix, p: u64) -> Result<ModKernel> {
    let f = PrimeField::new(p)?;
    let rows: Vec<Vec<(usize, Rational)>> = (0..m.nrows()).map(|r| m.row_entries(r).collect()).collect();
    let order = markowitz_order(&rows, m.ncols());
    let mut e = Echelon::new(&f, m.ncols(), Some(order));
    for r in &rows {
        e.insert(to_field_row(&f, r)?);
    }
    Ok(ModKernel { prime: p, rank: e.rank(), basis: e.kernel_basis() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{int, rat};

    fn big(n: i64) -> BigQ {
        to_big(&int(n))
    }

    #[test]
    fn kernel_mod_p_examples() {
        let z = SparseMatrix::from_int_rows(3, &vec![vec![0, 0, 0]; 3]);
        let k = kernel_mod_p(&z, 10007).unwrap();
        assert_eq!((k.rank, k.basis.len()), (0, 3));
        let id = SparseMatrix::from_int_rows(4, &(0..4).map(|i| (0..4).map(|j| (i == j) as i64).collect()).collect::<Vec<_>>());
        let k = kernel_mod_p(&id, 10007).unwrap();
        assert_eq!((k.rank, k.basis.len()), (4, 0));
        let m = SparseMatrix::from_int_rows(2, &[vec![1, 1], vec![2, 2]]);
        let k = kernel_mod_p(&m, 10007).unwrap();
        assert_eq!(k.rank, 1);
        assert_eq!(k.basis.len(), 1);
        let v = &k.basis[0];
        assert_eq!((v[0] + v[1]) % 10007, 0);
        assert_ne!(v[0], 0);
    }

    #[test]
    fn bad_prime_is_reported() {
        let m = SparseMatrix::from_dense(1, 1, &[rat(1, 7)]);
        assert!(matches!(kernel_mod_p(&m, 7), Err(Error::BadPrime { .. })));
    }

    #[test]
    fn certify_examples() {
        let id = SparseMatrix::from_int_rows(2, &[vec![1, 0], vec![0, 1]]);
        let c = certify_kernel(&id, &[]).unwrap();
        assert!(c.conclusive);
        assert_eq!(c.kernel_dim(), 0);

        let m = SparseMatrix::from_int_rows(2, &[vec![1, 1]]);
        let c = certify_kernel(&m, &[vec![(0, big(1)), (1, big(-1))]]).unwrap();
        assert!(c.conclusive);
        assert_eq!(c.kernel_dim(), 1);

        let m = SparseMatrix::from_int_rows(2, &[vec![2, 4]]);
        let c = certify_kernel(&m, &[vec![(0, big(2)), (1, big(-1))]]).unwrap();
        assert!(c.conclusive);
        assert_eq!(c.kernel_dim(), 1);
        assert_eq!(c.primes.len(), 2);
    }

    #[test]
    fn candidate_outside_kernel_names_row() {
        let m = SparseMatrix::from_int_rows(2, &[vec![1, 0], vec![1, 1]]);
        let err = certify_kernel(&m, &[vec![(1, big(1))]]).unwrap_err();
        assert!(matches!(err, Error::NotInKernel { row: 1, .. }), "{err}");
    }

    #[test]
    fn missing_candidates_leave_gap() {
        let m = SparseMatrix::from_int_rows(3, &[vec![1, 1, 0]]);
        let c = certify_kernel(&m, &[]).unwrap();
        // column 2 is unused and exhibited automatically; (1,-1,0) is not.
        assert_eq!(c.kernel_dim_bounds, (1, 2));
        assert!(!c.conclusive);
        let s = solve_kernel(&m, &[], &SolveOptions::default()).unwrap();
        assert!(s.conclusive);
        assert_eq!(s.kernel_dim(), 2);
    }
}
