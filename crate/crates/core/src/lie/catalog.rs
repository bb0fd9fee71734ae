//! Catalog file format and the bundled algebras.
//!
//! A catalog file is JSON:
//! `{"name": "h3", "dim": 3, "brackets": [{"i":1,"j":2,"k":3,"c":1}], "nilradical": [..]}`
//! with 1-based indices. `c` may be a number or a rational string such as `"2/3"`.

use serde::{Deserialize, Serialize};

use super::{BracketEntry, LieAlgebra};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Coefficient {
    Number(f64),
    Text(String),
}

impl Coefficient {
    /// Value and whether it was given exactly (integer or rational string).
    fn value(&self) -> Result<(f64, bool)> {
        match self {
            Coefficient::Number(x) => Ok((*x, x.fract() == 0.0)),
            Coefficient::Text(s) => {
                let s = s.trim();
                let parse = |t: &str| {
                    t.trim()
                        .parse::<i64>()
                        .map_err(|_| Error::Parse(format!("bad rational coefficient {s:?}")))
                };
                match s.split_once('/') {
                    Some((p, q)) => {
                        let (p, q) = (parse(p)?, parse(q)?);
                        if q == 0 {
                            return Err(Error::Parse(format!("zero denominator in {s:?}")));
                        }
                        Ok((p as f64 / q as f64, true))
                    }
                    None => match parse(s) {
                        Ok(p) => Ok((p as f64, true)),
                        Err(_) => s
                            .parse::<f64>()
                            .map(|x| (x, false))
                            .map_err(|_| Error::Parse(format!("bad coefficient {s:?}"))),
                    },
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BracketRecord {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub c: Coefficient,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlgebraFile {
    pub name: String,
    pub dim: usize,
    pub brackets: Vec<BracketRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nilradical: Option<Vec<usize>>,
}

impl AlgebraFile {
    pub fn to_algebra(&self) -> Result<LieAlgebra> {
        let mut entries = Vec::with_capacity(self.brackets.len());
        let mut rational = true;
        for b in &self.brackets {
            for index in [b.i, b.j, b.k] {
                if index == 0 || index > self.dim {
                    return Err(Error::IndexOutOfRange {
                        index,
                        dim: self.dim,
                    });
                }
            }
            let (c, exact) = b.c.value()?;
            rational &= exact;
            entries.push(BracketEntry {
                i: b.i - 1,
                j: b.j - 1,
                k: b.k - 1,
                c,
            });
        }
        let mut l = LieAlgebra::new(self.name.clone(), self.dim, entries)?.mark_rational(rational);
        if let Some(span) = &self.nilradical {
            if let Some(&bad) = span.iter().find(|&&i| i == 0 || i > self.dim) {
                return Err(Error::IndexOutOfRange {
                    index: bad,
                    dim: self.dim,
                });
            }
            l = l.with_nilradical(span.iter().map(|i| i - 1).collect())?;
        }
        Ok(l)
    }

    pub fn from_algebra(l: &LieAlgebra) -> Self {
        Self {
            name: l.name().to_string(),
            dim: l.dim(),
            brackets: l
                .entries()
                .iter()
                .map(|e| BracketRecord {
                    i: e.i + 1,
                    j: e.j + 1,
                    k: e.k + 1,
                    c: Coefficient::Number(e.c),
                })
                .collect(),
            nilradical: l.nilradical().map(|s| s.iter().map(|i| i + 1).collect()),
        }
    }
}

pub fn parse_algebra(source: &str) -> Result<LieAlgebra> {
    let file: AlgebraFile =
        serde_json::from_str(source).map_err(|e| Error::Parse(e.to_string()))?;
    file.to_algebra()
}

pub fn algebra_to_json(l: &LieAlgebra) -> String {
    serde_json::to_string_pretty(&AlgebraFile::from_algebra(l)).expect("serializable")
}

/// Bundled catalog as `(file name, contents)`.
pub const BUNDLED: &[(&str, &str)] = &[
    ("r2.alg", include_str!("../../catalog/r2.alg")),
    ("r3.alg", include_str!("../../catalog/r3.alg")),
    ("r4.alg", include_str!("../../catalog/r4.alg")),
    ("h3.alg", include_str!("../../catalog/h3.alg")),
    ("n4.alg", include_str!("../../catalog/n4.alg")),
    ("g31iii.alg", include_str!("../../catalog/g31iii.alg")),
    ("s4.alg", include_str!("../../catalog/s4.alg")),
    ("hyp2.alg", include_str!("../../catalog/hyp2.alg")),
    ("sl2.alg", include_str!("../../catalog/sl2.alg")),
];

/// Looks up a bundled entry by name, with or without the `.alg` suffix.
pub fn bundled(name: &str) -> Option<LieAlgebra> {
    let file = if name.ends_with(".alg") {
        name.to_string()
    } else {
        format!("{name}.alg")
    };
    BUNDLED
        .iter()
        .find(|(f, _)| *f == file)
        .map(|(_, src)| parse_algebra(src).expect("bundled catalog parses"))
}

pub fn h3() -> LieAlgebra {
    bundled("h3").expect("bundled")
}

pub fn n4() -> LieAlgebra {
    bundled("n4").expect("bundled")
}

pub fn g31iii() -> LieAlgebra {
    bundled("g31iii").expect("bundled")
}

/// The 4-dimensional solvable example with nilradical `span{e2, e3, e4}`.
pub fn s4() -> LieAlgebra {
    bundled("s4").expect("bundled")
}

/// `[e1, e2] = e2`.
pub fn hyperbolic_plane() -> LieAlgebra {
    bundled("hyp2").expect("bundled")
}

/// Basis `H, E, F` with `[H,E] = 2E`, `[H,F] = -2F`, `[E,F] = H`.
pub fn sl2() -> LieAlgebra {
    bundled("sl2").expect("bundled")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_entries_satisfy_jacobi() {
        for (file, _) in BUNDLED {
            let l = bundled(file).unwrap();
            assert!(l.validate_jacobi().passed, "{file}");
            assert!(l.is_rational());
        }
    }

    #[test]
    fn g31iii_shape() {
        let g = g31iii();
        assert_eq!(g.dim(), 7);
        assert_eq!(g.entries().len(), 5);
    }

    #[test]
    fn parse_errors() {
        let bad = r#"{"name":"x","dim":3,"brackets":[{"i":1,"j":2,"k":4,"c":1}]}"#;
        assert!(matches!(
            parse_algebra(bad),
            Err(Error::IndexOutOfRange { index: 4, dim: 3 })
        ));
        assert!(matches!(parse_algebra("{"), Err(Error::Parse(_))));
        let dup = r#"{"name":"x","dim":3,"brackets":[{"i":1,"j":2,"k":3,"c":1},{"i":1,"j":2,"k":3,"c":2}]}"#;
        assert!(matches!(parse_algebra(dup), Err(Error::DuplicateEntry { .. })));
    }

    #[test]
    fn rational_and_float_coefficients() {
        let src = r#"{"name":"x","dim":3,"brackets":[{"i":1,"j":2,"k":3,"c":"2/3"}]}"#;
        let l = parse_algebra(src).unwrap();
        assert!(l.is_rational());
        assert!((l.entries()[0].c - 2.0 / 3.0).abs() < 1e-16);
        let src = r#"{"name":"x","dim":3,"brackets":[{"i":1,"j":2,"k":3,"c":0.5}]}"#;
        assert!(!parse_algebra(src).unwrap().is_rational());
    }

    #[test]
    fn round_trip() {
        let s4 = s4();
        let back = parse_algebra(&algebra_to_json(&s4)).unwrap();
        assert_eq!(back.entries(), s4.entries());
        assert_eq!(back.nilradical(), Some(&[1, 2, 3][..]));
    }
}
