//! Smallest subspace containing given seeds and stable under given operators.

use std::collections::{HashSet, VecDeque};

use num_traits::Zero;
use serde::Serialize;

use super::echelon::Echelon;
use super::field::{Field, RationalField};
use crate::error::{Error, Result};
use crate::operator::{LinearOperator, SparseVec};

#[derive(Clone, Debug, Serialize)]
pub struct ClosureResult {
    pub dim: usize,
    /// Independent vectors spanning the closure, each an exact image of a seed
    /// under a word in the generators.
    #[serde(skip)]
    pub basis: Vec<SparseVec>,
    pub field: String,
    /// True when `dim` is the exact dimension over ℚ: either the elimination
    /// ran over ℚ, or the modular lower bound met the supplied upper bound.
    pub exact: bool,
    pub generator_applications: usize,
}

fn normalised(v: &SparseVec) -> Option<SparseVec> {
    let lead = v.first()?.1;
    Some(v.iter().map(|(i, x)| (*i, x / lead)).collect())
}

/// Span closure computed in `field`. Raw basis vectors are kept over ℚ and
/// are independent over ℚ whenever they are independent in `field`, so `dim`
/// is always a lower bound for the rational closure. `upper_bound` is a known
/// bound on that dimension (e.g. the ambient dimension) and ends the search
/// once reached.
pub fn span_closure_in<F: Field>(
    field: &F,
    ambient: usize,
    seeds: &[SparseVec],
    generators: &[LinearOperator],
    upper_bound: Option<usize>,
) -> Result<ClosureResult> {
    for g in generators {
        if g.rows != ambient || g.cols != ambient {
            return Err(Error::DimensionMismatch { expected: ambient, got: g.rows.max(g.cols) });
        }
    }
    for s in seeds {
        if let Some((i, _)) = s.iter().find(|(i, _)| *i >= ambient) {
            return Err(Error::DimensionMismatch { expected: ambient, got: i + 1 });
        }
    }
    let bound = upper_bound.unwrap_or(ambient).min(ambient);
    let transposes: Vec<LinearOperator> = generators.iter().map(LinearOperator::transpose).collect();
    let mut ech = Echelon::new(field, ambient, None);
    let mut basis: Vec<SparseVec> = Vec::new();
    let mut seen: HashSet<SparseVec> = HashSet::new();
    let mut queue: VecDeque<usize> = VecDeque::new();
    let mut applications = 0;

    let mut offer = |v: SparseVec, ech: &mut Echelon<F>, basis: &mut Vec<SparseVec>, queue: &mut VecDeque<usize>| -> Result<()> {
        let v: SparseVec = v.into_iter().filter(|(_, x)| !x.is_zero()).collect();
        let Some(key) = normalised(&v) else { return Ok(()) };
        if !seen.insert(key) {
            return Ok(());
        }
        let row = v.iter().map(|(i, x)| Ok((*i, field.from_rational(x)?))).collect::<Result<Vec<_>>>()?;
        if ech.insert(row) {
            basis.push(v);
            queue.push_back(basis.len() - 1);
        }
        Ok(())
    };

    for s in seeds {
        if ech.rank() >= bound {
            break;
        }
        offer(s.clone(), &mut ech, &mut basis, &mut queue)?;
    }
    'outer: while let Some(i) = queue.pop_front() {
        for t in &transposes {
            if ech.rank() >= bound {
                break 'outer;
            }
            applications += 1;
            let w = LinearOperator::apply_sparse_with_transpose(t, &basis[i]);
            offer(w, &mut ech, &mut basis, &mut queue)?;
        }
    }
    let dim = ech.rank();
    Ok(ClosureResult {
        dim,
        basis,
        field: field.name(),
        exact: F::EXACT || dim == bound,
        generator_applications: applications,
    })
}

/// Span closure over ℚ.
pub fn span_closure(ambient: usize, seeds: &[SparseVec], generators: &[LinearOperator]) -> Result<ClosureResult> {
    span_closure_in(&RationalField, ambient, seeds, generators, None)
}

/// Exact rank over ℚ.
pub fn rank_of_span(vectors: &[SparseVec]) -> usize {
    let Some(len) = vectors.iter().flat_map(|v| v.iter().map(|(i, _)| i + 1)).max() else { return 0 };
    let f = RationalField;
    let mut e = Echelon::new(&f, len, None);
    for v in vectors {
        e.insert(v.iter().map(|(i, x)| (*i, crate::to_big(x))));
    }
    e.rank()
}

/// Rank over ℤ/p (a lower bound for the rank over ℚ).
pub fn rank_of_span_mod_p(vectors: &[SparseVec], p: u64) -> Result<usize> {
    let Some(len) = vectors.iter().flat_map(|v| v.iter().map(|(i, _)| i + 1)).max() else { return Ok(0) };
    let f = super::field::PrimeField::new(p)?;
    let mut e = Echelon::new(&f, len, None);
    for v in vectors {
        e.insert(v.iter().map(|(i, x)| Ok((*i, f.from_rational(x)?))).collect::<Result<Vec<_>>>()?);
    }
    Ok(e.rank())
}

/// Whether every generator maps every basis vector back into the span, checked over ℚ.
pub fn is_closed(basis: &[SparseVec], generators: &[LinearOperator]) -> bool {
    let r = rank_of_span(basis);
    generators.iter().all(|g| {
        let t = g.transpose();
        basis.iter().all(|v| {
            let mut ext = basis.to_vec();
            ext.push(LinearOperator::apply_sparse_with_transpose(&t, v));
            rank_of_span(&ext) == r
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::int;
    use crate::linalg::field::{PrimeField, PRIMES};

    fn unit(i: usize) -> SparseVec {
        vec![(i, int(1))]
    }

    #[test]
    fn identity_generator() {
        let r = span_closure(3, &[vec![(0, int(1)), (2, int(5))]], &[LinearOperator::identity(3)]).unwrap();
        assert_eq!(r.dim, 1);
        assert!(r.exact);
    }

    #[test]
    fn rotation_fills_the_plane() {
        let rot = LinearOperator::from_dense(2, 2, &[int(0), int(-1), int(1), int(0)]);
        let r = span_closure(2, &[unit(0)], &[rot.clone()]).unwrap();
        assert_eq!(r.dim, 2);
        let f = PrimeField::new(PRIMES[0]).unwrap();
        let m = span_closure_in(&f, 2, &[unit(0)], &[rot], None).unwrap();
        assert_eq!(m.dim, 2);
        assert!(m.exact);
    }

    #[test]
    fn closure_is_idempotent() {
        let shift = LinearOperator::from_triplets(4, 4, [(1, 0, int(1)), (2, 1, int(1))]);
        let r = span_closure(4, &[unit(0)], &[shift.clone()]).unwrap();
        assert_eq!(r.dim, 3);
        assert!(is_closed(&r.basis, &[shift.clone()]));
        let again = span_closure(4, &r.basis, &[shift]).unwrap();
        assert_eq!(again.dim, r.dim);
    }

    #[test]
    fn ranks() {
        assert_eq!(rank_of_span(&[unit(0), unit(1), vec![(0, int(1)), (1, int(1))]]), 2);
        assert_eq!(rank_of_span(&[]), 0);
        assert_eq!(rank_of_span_mod_p(&[unit(0), vec![(0, int(2))]], 10007).unwrap(), 1);
    }
}
