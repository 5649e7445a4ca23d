//! Incremental sparse row echelon form.
//!
//! Columns are visited in a fixed order. Each pivot row starts at its pivot
//! (normalised to 1) and holds entries only at later positions, so inserting a
//! row only needs to clear entries until its leading position is free.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use super::field::Field;

pub struct Echelon<'f, F: Field> {
    field: &'f F,
    ncols: usize,
    /// column → position in the elimination order
    pos: Vec<u32>,
    /// position → column
    col_at: Vec<u32>,
    /// pivot row per position; entries are `(position, value)` with the pivot first
    pivots: Vec<Option<Box<[(u32, F::Elem)]>>>,
    rank: usize,
    scratch: Vec<F::Elem>,
    marked: Vec<bool>,
}

impl<'f, F: Field> Echelon<'f, F> {
    /// `order` lists columns in elimination order; `None` means natural order.
    pub fn new(field: &'f F, ncols: usize, order: Option<Vec<usize>>) -> Self {
        let col_at: Vec<u32> = match order {
            Some(o) => {
                assert_eq!(o.len(), ncols, "order must be a permutation of the columns");
                o.into_iter().map(|c| c as u32).collect()
            }
            None => (0..ncols as u32).collect(),
        };
        let mut pos = vec![u32::MAX; ncols];
        for (p, &c) in col_at.iter().enumerate() {
            assert!(pos[c as usize] == u32::MAX, "column {c} repeated in order");
            pos[c as usize] = p as u32;
        }
        Self {
            field,
            ncols,
            pos,
            col_at,
            pivots: (0..ncols).map(|_| None).collect(),
            rank: 0,
            scratch: vec![field.zero(); ncols],
            marked: vec![false; ncols],
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn pivot_columns(&self) -> Vec<usize> {
        (0..self.ncols).filter(|&p| self.pivots[p].is_some()).map(|p| self.col_at[p] as usize).collect()
    }

    /// Reduce `row` (column-indexed) against the current pivots. Returns true
    /// and stores a new pivot when the row is independent.
    pub fn insert<I>(&mut self, row: I) -> bool
    where
        I: IntoIterator<Item = (usize, F::Elem)>,
    {
        let f = self.field;
        let mut heap: BinaryHeap<Reverse<u32>> = BinaryHeap::new();
        let mut touched: Vec<u32> = Vec::new();
        for (c, v) in row {
            if f.is_zero(&v) {
                continue;
            }
            let p = self.pos[c];
            let pu = p as usize;
            self.scratch[pu] = f.add(&self.scratch[pu], &v);
            if !self.marked[pu] {
                self.marked[pu] = true;
                heap.push(Reverse(p));
                touched.push(p);
            }
        }
        let mut new_pivot = None;
        while let Some(Reverse(p)) = heap.pop() {
            let pu = p as usize;
            if f.is_zero(&self.scratch[pu]) {
                continue;
            }
            match &self.pivots[pu] {
                Some(prow) => {
                    let c = std::mem::replace(&mut self.scratch[pu], f.zero());
                    for (q, v) in prow.iter().skip(1) {
                        let qu = *q as usize;
                        self.scratch[qu] = f.mul_sub(&self.scratch[qu], &c, v);
                        if !self.marked[qu] {
                            self.marked[qu] = true;
                            heap.push(Reverse(*q));
                            touched.push(*q);
                        }
                    }
                }
                None => {
                    new_pivot = Some(p);
                    break;
                }
            }
        }
        let result = match new_pivot {
            Some(p) => {
                let inv = f.inv(&self.scratch[p as usize]);
                let mut rest: Vec<u32> = heap.into_iter().map(|r| r.0).collect();
                rest.sort_unstable();
                rest.dedup();
                let mut prow = Vec::with_capacity(rest.len() + 1);
                prow.push((p, f.one()));
                for q in rest {
                    let v = &self.scratch[q as usize];
                    if !f.is_zero(v) {
                        prow.push((q, f.mul(v, &inv)));
                    }
                }
                self.pivots[p as usize] = Some(prow.into_boxed_slice());
                self.rank += 1;
                true
            }
            None => false,
        };
        for p in touched {
            let pu = p as usize;
            self.marked[pu] = false;
            self.scratch[pu] = f.zero();
        }
        result
    }

    /// Kernel basis of the inserted rows, one dense column-indexed vector per
    /// free column, in elimination order of the free columns.
    pub fn kernel_basis(&self) -> Vec<Vec<F::Elem>> {
        let f = self.field;
        let free: Vec<usize> = (0..self.ncols).filter(|&p| self.pivots[p].is_none()).collect();
        let pivot_positions: Vec<usize> = (0..self.ncols).rev().filter(|&p| self.pivots[p].is_some()).collect();
        free.iter()
            .map(|&fp| {
                let mut x = vec![f.zero(); self.ncols];
                x[fp] = f.one();
                for &p in &pivot_positions {
                    let prow = self.pivots[p].as_ref().expect("pivot");
                    let mut acc = f.zero();
                    for (q, v) in prow.iter().skip(1) {
                        let xq = &x[*q as usize];
                        if !f.is_zero(xq) {
                            acc = f.mul_sub(&acc, v, xq);
                        }
                    }
                    x[p] = acc;
                }
                let mut out = vec![f.zero(); self.ncols];
                for (p, v) in x.into_iter().enumerate() {
                    out[self.col_at[p] as usize] = v;
                }
                out
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::field::{PrimeField, RationalField};
    use crate::{to_big, BigQ};
    use num_traits::Zero;

    fn q(n: i64) -> BigQ {
        to_big(&crate::int(n))
    }

    #[test]
    fn rank_and_kernel_over_q() {
        let f = RationalField;
        let mut e = Echelon::new(&f, 3, None);
        assert!(e.insert([(0, q(1)), (1, q(2)), (2, q(3))]));
        assert!(!e.insert([(0, q(2)), (1, q(4)), (2, q(6))]));
        assert!(e.insert([(1, q(1)), (2, q(1))]));
        assert_eq!(e.rank(), 2);
        let k = e.kernel_basis();
        assert_eq!(k.len(), 1);
        // x + 2y + 3z = 0, y + z = 0 → (−1, −1, 1)
        assert_eq!(k[0], vec![q(-1), q(-1), q(1)]);
    }

    #[test]
    fn custom_order_gives_same_rank_and_valid_kernel() {
        let f = PrimeField::new(10007).unwrap();
        let rows: Vec<Vec<(usize, u64)>> = vec![vec![(0, 1), (3, 2)], vec![(1, 5), (3, 1)], vec![(0, 1), (1, 5), (3, 3)]];
        let mut e = Echelon::new(&f, 4, Some(vec![3, 2, 1, 0]));
        for r in &rows {
            e.insert(r.clone());
        }
        assert_eq!(e.rank(), 2);
        for k in e.kernel_basis() {
            for r in &rows {
                let s = r.iter().fold(0u64, |acc, (c, v)| f.add(&acc, &f.mul(v, &k[*c])));
                assert_eq!(s, 0);
            }
        }
    }

    #[test]
    fn zero_rows_are_rejected() {
        let f = RationalField;
        let mut e = Echelon::new(&f, 2, None);
        assert!(!e.insert(std::iter::empty()));
        assert!(!e.insert([(0, BigQ::zero())]));
        assert_eq!(e.kernel_basis().len(), 2);
    }
}
