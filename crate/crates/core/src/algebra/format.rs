//! JSON algebra-definition files.
//!
//! ```json
//! {
//!   "dim": 1,
//!   "identity_index": 0,
//!   "basis_names": ["e0"],
//!   "flags": ["commutative", "unital"],
//!   "structure_constants": [[0, 0, 0, 1, 1]]
//! }
//! ```
//!
//! When the identity is not a single basis element, `identity` may be given
//! instead of `identity_index` as a list of `[index, numerator, denominator]`.

use std::collections::BTreeSet;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::{AlgebraSpec, Flag};
use crate::error::{Error, Result};
use crate::Rational;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AlgebraFile {
    dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    identity_index: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    identity: Option<Vec<[i64; 3]>>,
    basis_names: Vec<String>,
    flags: Vec<String>,
    structure_constants: Vec<[i64; 5]>,
}

fn ratio(n: i64, d: i64, what: &str) -> Result<Rational> {
    if d <= 0 {
        return Err(Error::InvalidAlgebra(format!("{what}: denominator must be positive, got {d}")));
    }
    Ok(Rational::new(n, d))
}

fn index(v: i64, dim: usize, what: &str) -> Result<usize> {
    usize::try_from(v)
        .ok()
        .filter(|&i| i < dim)
        .ok_or_else(|| Error::InvalidAlgebra(format!("{what} {v} out of range for dimension {dim}")))
}

pub fn parse_algebra_file(text: &str) -> Result<AlgebraSpec> {
    let file: AlgebraFile = serde_json::from_str(text).map_err(|e| Error::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let dim = file.dim;
    if dim == 0 {
        return Err(Error::InvalidAlgebra("dimension must be positive".into()));
    }
    let identity = match (file.identity_index, &file.identity) {
        (Some(_), Some(_)) => {
            return Err(Error::InvalidAlgebra("give either `identity_index` or `identity`, not both".into()))
        }
        (Some(i), None) => {
            if i >= dim {
                return Err(Error::InvalidAlgebra(format!("identity index {i} out of range for dimension {dim}")));
            }
            let mut e = vec![Rational::zero(); dim];
            e[i] = Rational::from_integer(1);
            Some(e)
        }
        (None, Some(entries)) => {
            let mut e = vec![Rational::zero(); dim];
            let mut seen = BTreeSet::new();
            for &[i, n, d] in entries {
                let i = index(i, dim, "identity index")?;
                if !seen.insert(i) {
                    return Err(Error::InvalidAlgebra(format!("duplicate identity entry {i}")));
                }
                e[i] = ratio(n, d, "identity")?;
            }
            Some(e)
        }
        (None, None) => None,
    };
    let mut flags = BTreeSet::new();
    for f in &file.flags {
        flags.insert(Flag::parse(f).ok_or_else(|| Error::InvalidAlgebra(format!("unknown flag `{f}`")))?);
    }
    let mut trip = Vec::with_capacity(file.structure_constants.len());
    for &[i, j, k, n, d] in &file.structure_constants {
        trip.push((
            index(i, dim, "structure constant index")?,
            index(j, dim, "structure constant index")?,
            index(k, dim, "structure constant index")?,
            ratio(n, d, "structure constant")?,
        ));
    }
    AlgebraSpec::new(dim, file.basis_names, identity, flags, trip)
}

/// Byte-stable serialisation; triplets sorted by `(i, j, k)`.
pub fn serialize_algebra(spec: &AlgebraSpec) -> String {
    let (identity_index, identity) = match (spec.identity_index(), spec.identity()) {
        (Some(i), _) => (Some(i), None),
        (None, Some(e)) => (
            None,
            Some(
                e.iter()
                    .enumerate()
                    .filter(|(_, v)| !v.is_zero())
                    .map(|(i, v)| [i as i64, *v.numer(), *v.denom()])
                    .collect(),
            ),
        ),
        (None, None) => (None, None),
    };
    let file = AlgebraFile {
        dim: spec.dim(),
        identity_index,
        identity,
        basis_names: spec.basis_names().to_vec(),
        flags: spec.flags().iter().map(|f| f.name().to_string()).collect(),
        structure_constants: spec
            .triplets()
            .into_iter()
            .map(|(i, j, k, v)| [i as i64, j as i64, k as i64, *v.numer(), *v.denom()])
            .collect(),
    };
    let mut s = serde_json::to_string(&file).expect("serialisable");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{build_j3o, diagonal_algebra, symmetric_2x2};

    #[test]
    fn parses_the_real_line() {
        let s = parse_algebra_file(
            r#"{"dim":1,"identity_index":0,"basis_names":["e0"],"flags":["commutative","unital"],"structure_constants":[[0,0,0,1,1]]}"#,
        )
        .unwrap();
        assert_eq!(s.dim(), 1);
        assert_eq!(s.identity_index(), Some(0));
    }

    #[test]
    fn identity_violation_is_reported() {
        let text = r#"{"dim":2,"identity_index":0,"basis_names":["e0","e1"],"flags":[],
            "structure_constants":[[0,0,0,1,1],[1,0,1,1,1],[1,1,1,1,1]]}"#;
        let err = parse_algebra_file(text).unwrap_err();
        assert!(err.to_string().contains("identity axiom violated"), "{err}");
    }

    #[test]
    fn syntax_errors_carry_position() {
        let err = parse_algebra_file("{\"dim\": 1,\n \"flags\": [}").unwrap_err();
        match err {
            Error::Syntax { line, column, .. } => {
                assert_eq!(line, 2);
                assert!(column > 0);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn range_and_duplicate_errors() {
        let oob = r#"{"dim":1,"identity_index":3,"basis_names":["e0"],"flags":[],"structure_constants":[[0,0,0,1,1]]}"#;
        assert!(parse_algebra_file(oob).unwrap_err().to_string().contains("out of range"));
        let dup = r#"{"dim":1,"identity_index":0,"basis_names":["e0"],"flags":[],"structure_constants":[[0,0,0,1,1],[0,0,0,1,1]]}"#;
        assert!(parse_algebra_file(dup).unwrap_err().to_string().contains("duplicate"));
        let neg = r#"{"dim":1,"basis_names":["e0"],"flags":[],"structure_constants":[[0,0,0,1,-1]]}"#;
        assert!(parse_algebra_file(neg).is_err());
    }

    #[test]
    fn asymmetric_constants_violate_commutative_flag() {
        let text = r#"{"dim":2,"basis_names":["a","b"],"flags":["commutative"],
            "structure_constants":[[0,1,1,1,1],[1,0,1,1,2]]}"#;
        let err = parse_algebra_file(text).unwrap_err();
        assert!(matches!(err, Error::FlagViolated { .. }), "{err}");
    }

    #[test]
    fn round_trips() {
        for spec in [build_j3o(), diagonal_algebra(3), symmetric_2x2()] {
            let text = serialize_algebra(&spec);
            let back = parse_algebra_file(&text).unwrap();
            assert_eq!(back, spec);
            assert_eq!(serialize_algebra(&back), text);
        }
    }
}
