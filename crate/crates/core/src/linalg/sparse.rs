//! Sparse exact matrices and row-level preprocessing.

use std::collections::hash_map::DefaultHasher;
use std::collections::HashMap;
use std::hash::{Hash, Hasher};

use num_integer::Integer;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::{BigQ, Rational};

/// Compressed sparse rows with exact rational entries.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SparseMatrix {
    ncols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<u32>,
    vals: Vec<Rational>,
}

impl SparseMatrix {
    pub fn new(ncols: usize) -> Self {
        Self { ncols, row_ptr: vec![0], col_idx: Vec::new(), vals: Vec::new() }
    }

    pub fn from_dense(rows: usize, cols: usize, entries: &[Rational]) -> Self {
        assert_eq!(entries.len(), rows * cols);
        let mut m = Self::new(cols);
        for r in 0..rows {
            m.push_row(
                entries[r * cols..(r + 1) * cols]
                    .iter()
                    .enumerate()
                    .filter(|(_, v)| !v.is_zero())
                    .map(|(c, v)| (c, *v)),
            );
        }
        m
    }

    pub fn from_int_rows(cols: usize, rows: &[Vec<i64>]) -> Self {
        let dense: Vec<Rational> = rows.iter().flatten().map(|v| Rational::from_integer(*v)).collect();
        Self::from_dense(rows.len(), cols, &dense)
    }

    /// Append a row; entries are summed per column and zeros dropped.
    pub fn push_row<I: IntoIterator<Item = (usize, Rational)>>(&mut self, entries: I) {
        let mut e: Vec<(usize, Rational)> = entries.into_iter().collect();
        e.sort_by_key(|x| x.0);
        let mut merged: Vec<(usize, Rational)> = Vec::with_capacity(e.len());
        for (c, v) in e {
            assert!(c < self.ncols, "column {c} out of range {}", self.ncols);
            match merged.last_mut() {
                Some(last) if last.0 == c => last.1 += v,
                _ => merged.push((c, v)),
            }
        }
        for (c, v) in merged {
            if !v.is_zero() {
                self.col_idx.push(c as u32);
                self.vals.push(v);
            }
        }
        self.row_ptr.push(self.col_idx.len());
    }

    pub fn nrows(&self) -> usize {
        self.row_ptr.len() - 1
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.col_idx.len()
    }

    pub fn row(&self, r: usize) -> (&[u32], &[Rational]) {
        let (a, b) = (self.row_ptr[r], self.row_ptr[r + 1]);
        (&self.col_idx[a..b], &self.vals[a..b])
    }

    pub fn row_entries(&self, r: usize) -> impl Iterator<Item = (usize, Rational)> + '_ {
        let (c, v) = self.row(r);
        c.iter().zip(v).map(|(c, v)| (*c as usize, *v))
    }

    /// `(row, col, value)` triplets in row-major order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, Rational)> + '_ {
        (0..self.nrows()).flat_map(move |r| self.row_entries(r).map(move |(c, v)| (r, c, v)))
    }

    /// First row on which `v` does not vanish, with the value, if any.
    pub fn first_violation(&self, v: &[(usize, BigQ)]) -> Result<Option<(usize, BigQ)>> {
        let mut dense: HashMap<usize, &BigQ> = HashMap::with_capacity(v.len());
        for (i, x) in v {
            if *i >= self.ncols {
                return Err(Error::DimensionMismatch { expected: self.ncols, got: i + 1 });
            }
            dense.insert(*i, x);
        }
        for r in 0..self.nrows() {
            let mut acc = BigQ::zero();
            for (c, a) in self.row_entries(r) {
                if let Some(x) = dense.get(&c) {
                    acc += crate::to_big(&a) * *x;
                }
            }
            if !acc.is_zero() {
                return Ok(Some((r, acc)));
            }
        }
        Ok(None)
    }

    /// Connected components of the row/column incidence graph. Rows in
    /// different components share no columns, so the kernel splits as a
    /// direct sum. Columns touched by no row are not listed.
    pub fn components(&self) -> Vec<Component> {
        let n = self.ncols;
        let mut parent: Vec<u32> = (0..n as u32).collect();
        fn find(parent: &mut [u32], mut x: u32) -> u32 {
            while parent[x as usize] != x {
                let g = parent[parent[x as usize] as usize];
                parent[x as usize] = g;
                x = g;
            }
            x
        }
        for r in 0..self.nrows() {
            let (cols, _) = self.row(r);
            if let Some((&first, rest)) = cols.split_first() {
                let mut a = find(&mut parent, first);
                for &c in rest {
                    let b = find(&mut parent, c);
                    if a != b {
                        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
                        parent[hi as usize] = lo;
                        a = lo;
                    }
                }
            }
        }
        // Re-find everything so roots are the minimum column of each component.
        let mut used = vec![false; n];
        for r in 0..self.nrows() {
            for &c in self.row(r).0 {
                used[c as usize] = true;
            }
        }
        let mut by_root: HashMap<u32, usize> = HashMap::new();
        let mut comps: Vec<Component> = Vec::new();
        for c in 0..n {
            if !used[c] {
                continue;
            }
            let root = find(&mut parent, c as u32);
            let id = *by_root.entry(root).or_insert_with(|| {
                comps.push(Component { cols: Vec::new(), rows: Vec::new() });
                comps.len() - 1
            });
            comps[id].cols.push(c);
        }
        for r in 0..self.nrows() {
            if let Some(&c) = self.row(r).0.first() {
                let root = find(&mut parent, c);
                comps[by_root[&root]].rows.push(r);
            }
        }
        comps
    }

    /// Columns that appear in no row.
    pub fn unused_columns(&self) -> Vec<usize> {
        let mut used = vec![false; self.ncols];
        for &c in &self.col_idx {
            used[c as usize] = true;
        }
        (0..self.ncols).filter(|&c| !used[c]).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Component {
    /// Sorted global column indices.
    pub cols: Vec<usize>,
    /// Global row indices, ascending.
    pub rows: Vec<usize>,
}

/// Scale a rational row to coprime integers with a positive leading entry.
/// Returns `None` for the zero row.
pub fn primitive_row(entries: &[(usize, Rational)]) -> Option<Vec<(u32, i64)>> {
    let mut e: Vec<(usize, Rational)> = entries.iter().filter(|(_, v)| !v.is_zero()).cloned().collect();
    if e.is_empty() {
        return None;
    }
    e.sort_by_key(|x| x.0);
    let l = e.iter().fold(1i64, |acc, (_, v)| acc.lcm(v.denom()));
    let ints: Vec<i64> = e.iter().map(|(_, v)| (v * Rational::from_integer(l)).to_integer()).collect();
    let g = ints.iter().fold(0i64, |acc, v| acc.gcd(v));
    let sign = if ints[0].is_negative() { -1 } else { 1 };
    Some(e.iter().zip(ints).map(|((c, _), v)| (*c as u32, sign * v / g)).collect())
}

/// Accumulates primitive integer rows, dropping zero rows and exact duplicates.
pub struct RowDeduper {
    matrix: SparseMatrix,
    index: HashMap<u64, Vec<u32>>,
    pub offered: usize,
    pub zero_rows: usize,
    pub duplicates: usize,
}

impl RowDeduper {
    pub fn new(ncols: usize) -> Self {
        Self { matrix: SparseMatrix::new(ncols), index: HashMap::new(), offered: 0, zero_rows: 0, duplicates: 0 }
    }

    pub fn offer(&mut self, entries: &[(usize, Rational)]) {
        self.offer_prepared(primitive_row(entries));
    }

    /// Offer a row already passed through [`primitive_row`].
    pub fn offer_prepared(&mut self, row: Option<Vec<(u32, i64)>>) {
        self.offered += 1;
        match row {
            None => self.zero_rows += 1,
            Some(row) => self.insert(row),
        }
    }

    fn insert(&mut self, row: Vec<(u32, i64)>) {
        let mut h = DefaultHasher::new();
        row.hash(&mut h);
        let key = h.finish();
        let m = &self.matrix;
        let bucket = self.index.entry(key).or_default();
        for &r in bucket.iter() {
            let (c, v) = m.row(r as usize);
            if c.len() == row.len() && row.iter().zip(c.iter().zip(v)).all(|((rc, rv), (mc, mv))| rc == mc && *mv == Rational::from_integer(*rv)) {
                self.duplicates += 1;
                return;
            }
        }
        bucket.push(m.nrows() as u32);
        self.matrix.push_row(row.into_iter().map(|(c, v)| (c as usize, Rational::from_integer(v))));
    }

    pub fn finish(self) -> SparseMatrix {
        self.matrix
    }

    pub fn len(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}
