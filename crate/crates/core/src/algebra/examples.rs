//! Small test algebras used as oracles.

use std::collections::BTreeSet;

use num_traits::{One, Zero};

use super::{AlgebraSpec, Flag};
use crate::{int, rat, Rational};

fn flags(f: &[Flag]) -> BTreeSet<Flag> {
    f.iter().copied().collect()
}

/// ℝ with `e⁰e⁰ = e⁰`.
pub fn real_line() -> AlgebraSpec {
    AlgebraSpec::new(
        1,
        vec!["e0".into()],
        Some(vec![Rational::one()]),
        flags(&[Flag::Commutative, Flag::Unital, Flag::Associative, Flag::Jordan]),
        [(0, 0, 0, Rational::one())],
    )
    .expect("valid")
}

/// ℝⁿ with pointwise product.
pub fn diagonal_algebra(n: usize) -> AlgebraSpec {
    AlgebraSpec::new(
        n,
        (0..n).map(|i| format!("d{i}")).collect(),
        Some(vec![Rational::one(); n]),
        flags(&[Flag::Commutative, Flag::Unital, Flag::Associative, Flag::Jordan]),
        (0..n).map(|i| (i, i, i, Rational::one())),
    )
    .expect("valid")
}

/// 2×2 real matrices; basis E11, E12, E21, E22 with index `2r + c`.
pub fn matrix_algebra_2x2() -> AlgebraSpec {
    let mut t = Vec::new();
    for i in 0..2 {
        for j in 0..2 {
            for l in 0..2 {
                // E_ij E_jl = E_il
                t.push((2 * i + j, 2 * j + l, 2 * i + l, Rational::one()));
            }
        }
    }
    AlgebraSpec::new(
        4,
        vec!["E11".into(), "E12".into(), "E21".into(), "E22".into()],
        Some(vec![int(1), int(0), int(0), int(1)]),
        flags(&[Flag::Unital, Flag::Associative]),
        t,
    )
    .expect("valid")
}

/// J₂(ℝ): symmetric 2×2 real matrices under `½(ab + ba)`; basis E11, E22, E12+E21.
pub fn symmetric_2x2() -> AlgebraSpec {
    let h = rat(1, 2);
    let one = Rational::one();
    let t = [
        (0, 0, 0, one),
        (1, 1, 1, one),
        (0, 2, 2, h),
        (2, 0, 2, h),
        (1, 2, 2, h),
        (2, 1, 2, h),
        (2, 2, 0, one),
        (2, 2, 1, one),
    ];
    AlgebraSpec::new(
        3,
        vec!["s11".into(), "s22".into(), "s12".into()],
        Some(vec![one, one, Rational::zero()]),
        flags(&[Flag::Commutative, Flag::Unital, Flag::Jordan]),
        t,
    )
    .expect("valid")
}
