//! Sparse exact linear operators.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::Rational;

/// Sparse vector as sorted `(index, value)` pairs with no stored zeros.
pub type SparseVec = Vec<(usize, Rational)>;

/// Exact rational matrix stored row-major; each row holds its nonzero entries
/// sorted by column.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct LinearOperator {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<SparseVec>,
}

pub fn sparse_from_dense(v: &[Rational]) -> SparseVec {
    v.iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(i, c)| (i, *c))
        .collect()
}

pub fn dense_from_sparse(v: &[(usize, Rational)], len: usize) -> Vec<Rational> {
    let mut out = vec![Rational::zero(); len];
    for (i, c) in v {
        out[*i] += c;
    }
    out
}

/// Collect `(index, value)` contributions into a sorted sparse vector.
pub fn accumulate<I: IntoIterator<Item = (usize, Rational)>>(terms: I) -> SparseVec {
    let mut acc: BTreeMap<usize, Rational> = BTreeMap::new();
    for (i, c) in terms {
        *acc.entry(i).or_insert_with(Rational::zero) += c;
    }
    acc.into_iter().filter(|(_, c)| !c.is_zero()).collect()
}

impl LinearOperator {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![Vec::new(); rows] }
    }

    pub fn identity(n: usize) -> Self {
        Self { rows: n, cols: n, data: (0..n).map(|i| vec![(i, Rational::one())]).collect() }
    }

    pub fn from_dense(rows: usize, cols: usize, entries: &[Rational]) -> Self {
        assert_eq!(entries.len(), rows * cols);
        let data = (0..rows).map(|r| sparse_from_dense(&entries[r * cols..(r + 1) * cols])).collect();
        Self { rows, cols, data }
    }

    /// Build from `(row, col, value)` triplets; repeated positions are summed.
    pub fn from_triplets(rows: usize, cols: usize, entries: impl IntoIterator<Item = (usize, usize, Rational)>) -> Self {
        let mut acc: Vec<BTreeMap<usize, Rational>> = vec![BTreeMap::new(); rows];
        for (r, c, v) in entries {
            assert!(r < rows && c < cols, "entry ({r}, {c}) outside {rows}x{cols}");
            *acc[r].entry(c).or_insert_with(Rational::zero) += v;
        }
        let data = acc
            .into_iter()
            .map(|m| m.into_iter().filter(|(_, v)| !v.is_zero()).collect())
            .collect();
        Self { rows, cols, data }
    }

    pub fn to_dense(&self) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); self.rows * self.cols];
        for (r, row) in self.data.iter().enumerate() {
            for (c, v) in row {
                out[r * self.cols + c] = *v;
            }
        }
        out
    }

    pub fn get(&self, r: usize, c: usize) -> Rational {
        match self.data[r].binary_search_by_key(&c, |e| e.0) {
            Ok(k) => self.data[r][k].1,
            Err(_) => Rational::zero(),
        }
    }

    pub fn nnz(&self) -> usize {
        self.data.iter().map(Vec::len).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Vec::is_empty)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn trace(&self) -> Rational {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i)).sum()
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, Rational)> + '_ {
        self.data.iter().enumerate().flat_map(|(r, row)| row.iter().map(move |(c, v)| (r, *c, *v)))
    }

    pub fn apply(&self, v: &[Rational]) -> Result<Vec<Rational>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch { expected: self.cols, got: v.len() });
        }
        Ok(self
            .data
            .iter()
            .map(|row| row.iter().map(|(c, a)| a * v[*c]).sum())
            .collect())
    }

    /// Apply to a sparse vector. Uses the transpose-free column scatter, so
    /// callers with many applications should cache [`LinearOperator::transpose`].
    pub fn apply_sparse_with_transpose(transpose: &LinearOperator, v: &[(usize, Rational)]) -> SparseVec {
        accumulate(v.iter().flat_map(|(j, x)| transpose.data[*j].iter().map(move |(i, a)| (*i, a * x))))
    }

    pub fn transpose(&self) -> Self {
        let mut data = vec![Vec::new(); self.cols];
        for (r, row) in self.data.iter().enumerate() {
            for (c, v) in row {
                data[*c].push((r, *v));
            }
        }
        Self { rows: self.cols, cols: self.rows, data }
    }

    /// `self ∘ rhs`.
    pub fn compose(&self, rhs: &LinearOperator) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch { expected: self.cols, got: rhs.rows });
        }
        let data = self
            .data
            .iter()
            .map(|row| accumulate(row.iter().flat_map(|(k, a)| rhs.data[*k].iter().map(move |(c, b)| (*c, a * b)))))
            .collect();
        Ok(Self { rows: self.rows, cols: rhs.cols, data })
    }

    pub fn add(&self, rhs: &LinearOperator) -> Result<Self> {
        self.lincomb(Rational::one(), rhs, Rational::one())
    }

    pub fn sub(&self, rhs: &LinearOperator) -> Result<Self> {
        self.lincomb(Rational::one(), rhs, -Rational::one())
    }

    /// `α·self + β·rhs`.
    pub fn lincomb(&self, alpha: Rational, rhs: &LinearOperator, beta: Rational) -> Result<Self> {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return Err(Error::Incompatible(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let data = self
            .data
            .iter()
            .zip(&rhs.data)
            .map(|(a, b)| accumulate(a.iter().map(|(c, v)| (*c, v * alpha)).chain(b.iter().map(|(c, v)| (*c, v * beta)))))
            .collect();
        Ok(Self { rows: self.rows, cols: self.cols, data })
    }

    pub fn scale(&self, s: Rational) -> Self {
        if s.is_zero() {
            return Self::zeros(self.rows, self.cols);
        }
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|row| row.iter().map(|(c, v)| (*c, v * s)).collect()).collect(),
        }
    }

    /// `[self, rhs] = self∘rhs − rhs∘self`.
    pub fn commutator(&self, rhs: &LinearOperator) -> Result<Self> {
        self.compose(rhs)?.sub(&rhs.compose(self)?)
    }

    /// Kronecker product; index `(i, j) ↦ i·rhs.rows + j`.
    pub fn kron(&self, rhs: &LinearOperator) -> Self {
        let rows = self.rows * rhs.rows;
        let cols = self.cols * rhs.cols;
        let mut data = Vec::with_capacity(rows);
        for arow in &self.data {
            for brow in &rhs.data {
                let mut row = Vec::with_capacity(arow.len() * brow.len());
                for (ac, av) in arow {
                    for (bc, bv) in brow {
                        row.push((ac * rhs.cols + bc, av * bv));
                    }
                }
                data.push(row);
            }
        }
        Self { rows, cols, data }
    }

    /// Block-diagonal direct sum.
    pub fn direct_sum(blocks: &[&LinearOperator]) -> Self {
        let rows = blocks.iter().map(|b| b.rows).sum();
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut data = Vec::with_capacity(rows);
        let mut off = 0;
        for b in blocks {
            for row in &b.data {
                data.push(row.iter().map(|(c, v)| (c + off, *v)).collect());
            }
            off += b.cols;
        }
        Self { rows, cols, data }
    }

    /// Row-major flattening into a sparse vector of length `rows·cols`.
    pub fn flatten(&self) -> SparseVec {
        self.triplets().map(|(r, c, v)| (r * self.cols + c, v)).collect()
    }

    /// Least common multiple of all entry denominators.
    pub fn denominator_lcm(&self) -> i64 {
        self.triplets().fold(1i64, |acc, (_, _, v)| num_integer::lcm(acc, *v.denom()))
    }
}

impl fmt::Debug for LinearOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LinearOperator({}x{}, nnz={})", self.rows, self.cols, self.nnz())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::int;

    fn m(rows: usize, cols: usize, v: &[i64]) -> LinearOperator {
        LinearOperator::from_dense(rows, cols, &v.iter().map(|x| int(*x)).collect::<Vec<_>>())
    }

    #[test]
    fn compose_matches_dense_product() {
        let a = m(2, 3, &[1, 2, 0, 0, -1, 3]);
        let b = m(3, 2, &[1, 0, 2, 1, 0, 4]);
        let c = a.compose(&b).unwrap();
        assert_eq!(c.to_dense(), [5, 2, -2, 11].map(int).to_vec());
        assert!(a.compose(&a).is_err());
    }

    #[test]
    fn kron_and_transpose() {
        let a = m(2, 2, &[0, 1, 1, 0]);
        let i = LinearOperator::identity(2);
        let k = a.kron(&i);
        assert_eq!(k.get(0, 2), int(1));
        assert_eq!(k.get(1, 3), int(1));
        assert_eq!(k.get(0, 1), int(0));
        let t = m(2, 3, &[1, 2, 3, 4, 5, 6]).transpose();
        assert_eq!(t.to_dense(), [1, 4, 2, 5, 3, 6].map(int).to_vec());
    }

    #[test]
    fn sparse_apply_matches_dense_apply() {
        let a = m(3, 3, &[1, 2, 0, 0, -1, 3, 4, 0, 1]);
        let v = [int(1), int(0), int(-2)];
        let dense = a.apply(&v).unwrap();
        let sparse = LinearOperator::apply_sparse_with_transpose(&a.transpose(), &sparse_from_dense(&v));
        assert_eq!(dense_from_sparse(&sparse, 3), dense);
    }

    #[test]
    fn commutator_of_commuting_is_zero() {
        let a = m(2, 2, &[2, 0, 0, 3]);
        let b = m(2, 2, &[5, 0, 0, -1]);
        assert!(a.commutator(&b).unwrap().is_zero());
    }
}
