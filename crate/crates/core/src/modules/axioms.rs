//! Exhaustive checks of the Jordan-module axioms and of associativity of a representation.

use rayon::prelude::*;
use serde::Serialize;

use super::intop::{Combo, Evaluator, IntAction, IntTable, Term};
use super::{build_split_bimodule, ModuleAction};
use crate::error::Result;

const MAX_WITNESSES: usize = 5;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AxiomWitness {
    /// Basis labels of the algebra arguments, in the order of the identity's slots.
    pub tuple: Vec<String>,
    /// A nonzero entry `(row, col)` of the residual operator and its value.
    pub entry: (usize, usize),
    pub value: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AxiomSweep {
    pub identity: String,
    pub tuples_checked: usize,
    pub violations: usize,
    pub witnesses: Vec<AxiomWitness>,
}

impl AxiomSweep {
    pub fn pass(&self) -> bool {
        self.violations == 0
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ModuleAxiomReport {
    pub pass: bool,
    pub algebra_dim: usize,
    pub module_dim: usize,
    pub commutator_identity: AxiomSweep,
    pub jordan_action: AxiomSweep,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AssociativeRepReport {
    pub pass: bool,
    pub sweep: AxiomSweep,
}

fn sweep<F>(name: &str, action: &ModuleAction, table: &IntTable, tuples: Vec<Vec<usize>>, terms: F) -> AxiomSweep
where
    F: Fn(&[usize]) -> Vec<Term> + Sync,
{
    let int = IntAction::new(action.module_dim(), action.basis_ops());
    let names = action.algebra().basis_names();
    let found: Vec<Option<AxiomWitness>> = tuples
        .par_iter()
        .map_init(
            || Evaluator::new(&int, table),
            |ev, t| {
                ev.first_nonzero(&terms(t)).map(|(r, c, v)| AxiomWitness {
                    tuple: t.iter().map(|&i| names[i].clone()).collect(),
                    entry: (r, c),
                    value: v.to_string(),
                })
            },
        )
        .collect();
    let violations = found.iter().filter(|w| w.is_some()).count();
    AxiomSweep {
        identity: name.into(),
        tuples_checked: tuples.len(),
        violations,
        witnesses: found.into_iter().flatten().take(MAX_WITNESSES).collect(),
    }
}

fn mono(coeff: i128, factors: Vec<Combo>) -> Term {
    Term { coeff, factors }
}

/// Sweeps the two Jordan-module identities, fully linearised:
///
/// * `[π(x), π(y∘z)] + [π(y), π(z∘x)] + [π(z), π(x∘y)] = 0` over multisets `x ≤ y ≤ z`;
/// * `π(x)π(b)π(y) + π(y)π(b)π(x) + π((x∘y)∘b) = π(x∘b)π(y) + π(y∘b)π(x) + π(x∘y)π(b)`
///   over `x ≤ y` and all `b`.
///
/// Setting all arguments equal recovers `[π(a), π(a²)] = 0` and
/// `2π(a)π(b)π(a) + π(a²∘b) = 2π(a∘b)π(a) + π(a²)π(b)`. The product used is
/// `½(ab + ba)`, which is the algebra product whenever it is commutative.
pub fn check_module_axioms(action: &ModuleAction) -> ModuleAxiomReport {
    let alg = action.algebra();
    let n = alg.dim();
    let table = IntTable::jordan(alg);
    let b = Combo::basis;

    let triples: Vec<Vec<usize>> =
        (0..n).flat_map(|x| (x..n).flat_map(move |y| (y..n).map(move |z| vec![x, y, z]))).collect();
    let commutator = sweep("[pi(x), pi(y*z)] + cyclic = 0", action, &table, triples, |t| {
        let (x, y, z) = (t[0], t[1], t[2]);
        let mut terms = Vec::with_capacity(6);
        for (p, q, r) in [(x, y, z), (y, z, x), (z, x, y)] {
            let qr = table.mul(&b(q), &b(r));
            terms.push(mono(1, vec![b(p), qr.clone()]));
            terms.push(mono(-1, vec![qr, b(p)]));
        }
        terms
    });

    let triples: Vec<Vec<usize>> =
        (0..n).flat_map(|x| (x..n).flat_map(move |y| (0..n).map(move |c| vec![x, c, y]))).collect();
    let jordan = sweep("linearised Jordan action identity", action, &table, triples, |t| {
        let (x, c, y) = (t[0], t[1], t[2]);
        let xy = table.mul(&b(x), &b(y));
        vec![
            mono(1, vec![b(x), b(c), b(y)]),
            mono(1, vec![b(y), b(c), b(x)]),
            mono(1, vec![table.mul(&xy, &b(c))]),
            mono(-1, vec![table.mul(&b(x), &b(c)), b(y)]),
            mono(-1, vec![table.mul(&b(y), &b(c)), b(x)]),
            mono(-1, vec![xy, b(c)]),
        ]
    });

    ModuleAxiomReport {
        pass: commutator.pass() && jordan.pass(),
        algebra_dim: n,
        module_dim: action.module_dim(),
        commutator_identity: commutator,
        jordan_action: jordan,
    }
}

/// Tests `π(ab) = ½(π(a)π(b) + π(b)π(a))` on all ordered basis pairs, with the
/// algebra's own product.
pub fn check_associative_rep(action: &ModuleAction) -> AssociativeRepReport {
    let n = action.algebra().dim();
    let table = IntTable::plain(action.algebra());
    let b = Combo::basis;
    let pairs: Vec<Vec<usize>> = (0..n).flat_map(|x| (0..n).map(move |y| vec![x, y])).collect();
    let s = sweep("pi(ab) = (pi(a)pi(b) + pi(b)pi(a))/2", action, &table, pairs, |t| {
        let (x, y) = (t[0], t[1]);
        vec![mono(2, vec![table.mul(&b(x), &b(y))]), mono(-1, vec![b(x), b(y)]), mono(-1, vec![b(y), b(x)])]
    });
    AssociativeRepReport { pass: s.pass(), sweep: s }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SymmetrizedControlReport {
    pub points: usize,
    pub module_dim: usize,
    pub left: ModuleAxiomReport,
    pub right: ModuleAxiomReport,
    pub symmetrized: ModuleAxiomReport,
    /// `π_L` and `π_R` are Jordan actions while `½(π_L + π_R)` is not.
    pub pass: bool,
}

/// Negative control on the split bimodule over `⊕ⁿJ₃(𝕆)` with every sector of
/// multiplicity one: `π_L` and `π_R` satisfy the module axioms, their average
/// `π_S = ½(π_L + π_R)` does not.
pub fn symmetrized_control(n: usize) -> Result<SymmetrizedControlReport> {
    let sectors = (1..=n).flat_map(|a| (1..=n).map(move |b| ((a, b), 1))).collect();
    let m = build_split_bimodule(n, &sectors)?;
    let left = check_module_axioms(m.left());
    let right = check_module_axioms(m.right());
    let symmetrized = check_module_axioms(&m.left().symmetrized(m.right())?);
    let pass = left.pass && right.pass && !symmetrized.pass;
    Ok(SymmetrizedControlReport { points: n, module_dim: m.module_dim(), left, right, symmetrized, pass })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{build_j3o, diagonal_algebra, matrix_algebra_2x2, symmetric_2x2};
    use crate::{int, rat};

    // Direct rational evaluation of the unlinearised identities at a = x + y.
    fn naive_jordan_action(action: &ModuleAction, a: &[crate::Rational], bb: &[crate::Rational]) -> bool {
        let alg = action.algebra();
        let p = |v: &[crate::Rational]| action.op(v).unwrap();
        let a2 = alg.product(a, a).unwrap();
        let lhs = p(a).compose(&p(bb)).unwrap().compose(&p(a)).unwrap().scale(int(2)).add(&p(&alg.product(&a2, bb).unwrap())).unwrap();
        let rhs = p(&alg.product(a, bb).unwrap())
            .compose(&p(a))
            .unwrap()
            .scale(int(2))
            .add(&p(&a2).compose(&p(bb)).unwrap())
            .unwrap();
        lhs == rhs
    }

    #[test]
    fn regular_j3o_is_a_jordan_module() {
        let j = build_j3o();
        let r = check_module_axioms(&ModuleAction::regular(&j));
        assert!(r.pass, "{r:?}");
        assert_eq!(r.commutator_identity.tuples_checked, 27 * 28 * 29 / 6);
        assert_eq!(r.jordan_action.tuples_checked, 27 * 28 / 2 * 27);
    }

    #[test]
    fn j3o_has_no_associative_regular_rep() {
        let j = build_j3o();
        let r = check_associative_rep(&ModuleAction::regular(&j));
        assert!(!r.pass);
        assert!(!r.sweep.witnesses.is_empty());
    }

    #[test]
    fn associative_examples_pass() {
        let r2 = diagonal_algebra(2);
        assert!(check_associative_rep(&ModuleAction::regular(&r2)).pass);
        assert!(check_associative_rep(&ModuleAction::zero(&build_j3o(), 1)).pass);
    }

    #[test]
    fn symmetrised_action_of_associative_bimodule_is_jordan() {
        let m = matrix_algebra_2x2();
        let l = ModuleAction::regular(&m);
        let r = ModuleAction::regular_right(&m);
        let s = l.symmetrized(&r).unwrap();
        assert!(check_module_axioms(&s).pass);
        // The one-sided action of a noncommutative algebra is not a module over A⁺.
        assert!(!check_module_axioms(&l).pass);
    }

    #[test]
    fn detects_a_broken_action() {
        let j = symmetric_2x2();
        let mut ops = j.left_mult_basis();
        ops[2] = ops[2].scale(rat(1, 2));
        let bad = ModuleAction::new(j.clone(), 3, ops).unwrap();
        let rep = check_module_axioms(&bad);
        assert!(!rep.pass);
        let w = &rep.jordan_action.witnesses;
        assert!(!w.is_empty() || !rep.commutator_identity.witnesses.is_empty());
        // The naive identity disagrees somewhere too.
        let e = |i| j.basis(i);
        let any = (0..3).any(|x| (0..3).any(|b| !naive_jordan_action(&bad, &e(x), &e(b))));
        assert!(any);
    }

    #[test]
    fn linearised_matches_naive_on_small_algebra() {
        let j = symmetric_2x2();
        let act = ModuleAction::regular(&j).with_multiplicity(2).unwrap();
        assert!(check_module_axioms(&act).pass);
        for x in 0..3 {
            for y in 0..3 {
                let a: Vec<_> = j.basis(x).iter().zip(j.basis(y)).map(|(p, q)| p + q).collect();
                for b in 0..3 {
                    assert!(naive_jordan_action(&act, &a, &j.basis(b)));
                }
            }
        }
    }
}
