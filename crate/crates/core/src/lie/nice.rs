use serde::{Deserialize, Serialize};

use super::LieAlgebra;

/// One nonzero structure constant `[e_i, e_j] = c e_k`, 0-based, `i < j`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NiceTriple {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub c: f64,
}

/// The triple set of a nice basis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NiceStructure {
    pub dim: usize,
    pub triples: Vec<NiceTriple>,
}

impl NiceStructure {
    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    /// Rebuilds the algebra with new constants, one per triple.
    pub fn with_constants(&self, name: &str, c: &[f64]) -> crate::Result<LieAlgebra> {
        assert_eq!(c.len(), self.triples.len());
        LieAlgebra::new(
            name,
            self.dim,
            self.triples.iter().zip(c).map(|(t, &c)| super::BracketEntry {
                i: t.i,
                j: t.j,
                k: t.k,
                c,
            }),
        )
    }
}

/// Why a basis fails to be nice. Indices are 1-based.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum NiceWitness {
    /// `[e_i, e_j]` has more than one nonzero component.
    NotMonomial { pair: (usize, usize) },
    /// Two pairs with a common index bracket into the same `e_k`.
    SharedOutput {
        k: usize,
        first: (usize, usize),
        second: (usize, usize),
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum NiceReport {
    Nice(NiceStructure),
    NotNice(NiceWitness),
}

impl NiceReport {
    pub fn structure(&self) -> Option<&NiceStructure> {
        match self {
            NiceReport::Nice(s) => Some(s),
            NiceReport::NotNice(_) => None,
        }
    }
}

pub fn nice_basis_report(l: &LieAlgebra) -> NiceReport {
    let mut triples: Vec<NiceTriple> = Vec::new();
    for e in l.entries() {
        if let Some(prev) = triples.iter().find(|t| t.i == e.i && t.j == e.j) {
            debug_assert_ne!(prev.k, e.k);
            return NiceReport::NotNice(NiceWitness::NotMonomial {
                pair: (e.i + 1, e.j + 1),
            });
        }
        triples.push(NiceTriple {
            i: e.i,
            j: e.j,
            k: e.k,
            c: e.c,
        });
    }
    for (a, s) in triples.iter().enumerate() {
        for t in &triples[a + 1..] {
            if s.k == t.k && (s.i == t.i || s.i == t.j || s.j == t.i || s.j == t.j) {
                return NiceReport::NotNice(NiceWitness::SharedOutput {
                    k: s.k + 1,
                    first: (s.i + 1, s.j + 1),
                    second: (t.i + 1, t.j + 1),
                });
            }
        }
    }
    NiceReport::Nice(NiceStructure {
        dim: l.dim(),
        triples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::{catalog, BracketEntry};

    #[test]
    fn catalog_examples() {
        let h3 = nice_basis_report(&catalog::h3());
        let s = h3.structure().unwrap();
        assert_eq!(s.triples.len(), 1);
        assert_eq!((s.triples[0].i, s.triples[0].j, s.triples[0].k), (0, 1, 2));
        assert_eq!(nice_basis_report(&catalog::g31iii()).structure().unwrap().len(), 5);
    }

    #[test]
    fn witnesses() {
        let l = LieAlgebra::new(
            "x",
            4,
            [
                BracketEntry { i: 0, j: 1, k: 2, c: 1.0 },
                BracketEntry { i: 0, j: 1, k: 3, c: 1.0 },
            ],
        )
        .unwrap();
        assert_eq!(
            nice_basis_report(&l),
            NiceReport::NotNice(NiceWitness::NotMonomial { pair: (1, 2) })
        );
        let l = LieAlgebra::new(
            "y",
            4,
            [
                BracketEntry { i: 0, j: 1, k: 3, c: 1.0 },
                BracketEntry { i: 0, j: 2, k: 3, c: 1.0 },
            ],
        )
        .unwrap();
        assert!(matches!(
            nice_basis_report(&l),
            NiceReport::NotNice(NiceWitness::SharedOutput { k: 4, .. })
        ));
    }
}
