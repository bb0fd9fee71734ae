//! Finite-dimensional real Lie algebras given by structure constants.

mod derivation;
mod nice;
mod tensor;

pub mod catalog;

pub use derivation::{derivation_space, is_derivation, DerivationCheck, DerivationSpace};
pub use nice::{nice_basis_report, NiceReport, NiceStructure, NiceTriple, NiceWitness};
pub use tensor::StructureTensor;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Threshold below which a floating-point structure constant counts as zero.
pub const ZERO_TOL: f64 = 1e-12;

/// A nonzero bracket `[e_i, e_j] = c e_k` with `i < j`, 0-based.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BracketEntry {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub c: f64,
}

#[derive(Debug, Clone)]
pub struct LieAlgebra {
    name: String,
    dim: usize,
    entries: Vec<BracketEntry>,
    mu: StructureTensor,
    rational: bool,
    nilradical: Option<Vec<usize>>,
}

impl LieAlgebra {
    /// Builds an algebra from 0-based entries. Entries with `i > j` are
    /// flipped with a sign change; `i == j` and repeated `(i, j, k)` are
    /// rejected.
    pub fn new(
        name: impl Into<String>,
        dim: usize,
        entries: impl IntoIterator<Item = BracketEntry>,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Parse("dimension must be positive".into()));
        }
        let mut canonical: Vec<BracketEntry> = Vec::new();
        for e in entries {
            for index in [e.i, e.j, e.k] {
                if index >= dim {
                    return Err(Error::IndexOutOfRange {
                        index: index + 1,
                        dim,
                    });
                }
            }
            if e.i == e.j {
                return Err(Error::Parse(format!(
                    "bracket of e{} with itself must vanish",
                    e.i + 1
                )));
            }
            let entry = if e.i < e.j {
                e
            } else {
                BracketEntry {
                    i: e.j,
                    j: e.i,
                    k: e.k,
                    c: -e.c,
                }
            };
            if canonical
                .iter()
                .any(|x| x.i == entry.i && x.j == entry.j && x.k == entry.k)
            {
                return Err(Error::DuplicateEntry {
                    i: entry.i + 1,
                    j: entry.j + 1,
                    k: entry.k + 1,
                });
            }
            canonical.push(entry);
        }
        canonical.retain(|e| e.c != 0.0);
        canonical.sort_by_key(|e| (e.i, e.j, e.k));
        let mut mu = StructureTensor::zeros(dim);
        for e in &canonical {
            mu.set_antisymmetric(e.i, e.j, e.k, e.c);
        }
        Ok(Self {
            name: name.into(),
            dim,
            entries: canonical,
            mu,
            rational: false,
            nilradical: None,
        })
    }

    pub fn abelian(dim: usize) -> Self {
        Self::new(format!("abelian{dim}"), dim, []).expect("abelian algebra is valid")
    }

    /// Builds an algebra from a dense antisymmetric tensor.
    pub fn from_tensor(name: impl Into<String>, mu: &StructureTensor) -> Result<Self> {
        let n = mu.dim();
        let mut entries = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                for k in 0..n {
                    let c = mu.get(i, j, k);
                    if c.abs() > ZERO_TOL {
                        entries.push(BracketEntry { i, j, k, c });
                    }
                }
            }
        }
        Self::new(name, n, entries)
    }

    pub fn with_nilradical(mut self, span: Vec<usize>) -> Result<Self> {
        if let Some(&bad) = span.iter().find(|&&i| i >= self.dim) {
            return Err(Error::IndexOutOfRange {
                index: bad + 1,
                dim: self.dim,
            });
        }
        self.nilradical = Some(span);
        Ok(self)
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub(crate) fn mark_rational(mut self, rational: bool) -> Self {
        self.rational = rational;
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[BracketEntry] {
        &self.entries
    }

    /// The bracket as an element of the bracket space.
    pub fn structure(&self) -> &StructureTensor {
        &self.mu
    }

    /// True when every structure constant was given as an exact rational.
    pub fn is_rational(&self) -> bool {
        self.rational
    }

    /// Declared nilradical span (0-based basis indices), if any.
    pub fn nilradical(&self) -> Option<&[usize]> {
        self.nilradical.as_deref()
    }

    pub fn is_abelian(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn bracket(&self, x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
        self.mu.apply(x, y)
    }

    /// `ad(e_i)` as a matrix.
    pub fn ad_basis(&self, i: usize) -> DMatrix<f64> {
        self.mu.left_mul(i)
    }

    pub fn ad(&self, x: &DVector<f64>) -> DMatrix<f64> {
        let mut out = DMatrix::zeros(self.dim, self.dim);
        for i in 0..self.dim {
            if x[i] != 0.0 {
                out += self.ad_basis(i) * x[i];
            }
        }
        out
    }

    pub fn basis_vector(&self, i: usize) -> DVector<f64> {
        let mut v = DVector::zeros(self.dim);
        v[i] = 1.0;
        v
    }

    pub fn validate_jacobi(&self) -> JacobiReport {
        validate_jacobi(self)
    }

    pub fn lower_central_series(&self) -> CentralSeries {
        lower_central_series(self)
    }

    pub fn is_nilpotent(&self) -> bool {
        self.lower_central_series().nilpotent
    }

    pub fn is_unimodular(&self) -> bool {
        unimodularity(self)
    }

    pub fn killing_form(&self) -> DMatrix<f64> {
        killing_form(self)
    }
}

/// Outcome of the Jacobi check; failures are reported, not raised.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct JacobiReport {
    pub passed: bool,
    pub max_residual: f64,
    /// First violating triple, 1-based.
    pub violating_triple: Option<(usize, usize, usize)>,
}

/// Checks `[[e_i,e_j],e_l] + [[e_j,e_l],e_i] + [[e_l,e_i],e_j] = 0`.
///
/// The cyclic sum is totally antisymmetric, so triples `i < j < l` suffice.
pub fn validate_jacobi(l: &LieAlgebra) -> JacobiReport {
    let n = l.dim;
    let mu = &l.mu;
    let mut max_residual = 0.0_f64;
    let mut violating = None;
    let jacobiator = |a: usize, b: usize, c: usize, out: usize| -> f64 {
        let mut s = 0.0;
        for r in 0..n {
            s += mu.get(a, b, r) * mu.get(r, c, out);
            s += mu.get(b, c, r) * mu.get(r, a, out);
            s += mu.get(c, a, r) * mu.get(r, b, out);
        }
        s
    };
    for i in 0..n {
        for j in (i + 1)..n {
            for k in (j + 1)..n {
                let worst = (0..n)
                    .map(|o| jacobiator(i, j, k, o).abs())
                    .fold(0.0, f64::max);
                if worst > ZERO_TOL && violating.is_none() {
                    violating = Some((i + 1, j + 1, k + 1));
                }
                max_residual = max_residual.max(worst);
            }
        }
    }
    JacobiReport {
        passed: violating.is_none(),
        max_residual,
        violating_triple: violating,
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct CentralSeries {
    /// Dimensions of `g, [g,g], [g,[g,g]], ...` up to the first repeat.
    pub dimensions: Vec<usize>,
    pub nilpotent: bool,
}

/// Orthonormal basis for the span of the columns of `m`.
fn column_span(m: &DMatrix<f64>) -> DMatrix<f64> {
    if m.ncols() == 0 || m.nrows() == 0 {
        return DMatrix::zeros(m.nrows(), 0);
    }
    let svd = m.clone().svd(true, false);
    let u = svd.u.expect("left singular vectors requested");
    let scale = svd.singular_values.max().max(1.0);
    let cols: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] > 1e-10 * scale)
        .collect();
    DMatrix::from_fn(m.nrows(), cols.len(), |r, c| u[(r, cols[c])])
}

pub fn lower_central_series(l: &LieAlgebra) -> CentralSeries {
    let n = l.dim;
    let mut current = DMatrix::identity(n, n);
    let mut dims = vec![n];
    loop {
        let mut generators = Vec::new();
        for i in 0..n {
            let ad = l.ad_basis(i);
            for c in 0..current.ncols() {
                generators.push(&ad * current.column(c));
            }
        }
        let next = if generators.is_empty() {
            DMatrix::zeros(n, 0)
        } else {
            column_span(&DMatrix::from_columns(&generators))
        };
        let d = next.ncols();
        let last = *dims.last().expect("series starts with the algebra");
        dims.push(d);
        if d == 0 || d == last {
            return CentralSeries {
                nilpotent: d == 0,
                dimensions: dims,
            };
        }
        current = next;
    }
}

/// `tr ad(e_i) = 0` for every basis vector.
pub fn unimodularity(l: &LieAlgebra) -> bool {
    (0..l.dim).all(|i| l.ad_basis(i).trace().abs() <= ZERO_TOL)
}

/// `kappa(x, y) = tr(ad x ad y)`.
pub fn killing_form(l: &LieAlgebra) -> DMatrix<f64> {
    let ads: Vec<DMatrix<f64>> = (0..l.dim).map(|i| l.ad_basis(i)).collect();
    DMatrix::from_fn(l.dim, l.dim, |i, j| (&ads[i] * &ads[j]).trace())
}

/// `s = R xi + L` with `[xi, x] = D x`; `xi` is the last basis vector.
///
/// The original algebra is recorded as the declared nilradical span of the result.
pub fn semidirect_extend(l: &LieAlgebra, d: &DMatrix<f64>) -> Result<LieAlgebra> {
    let check = is_derivation(l, d)?;
    if !check.is_derivation {
        return Err(Error::NotADerivation {
            residual: check.residual,
        });
    }
    let n = l.dim;
    let xi = n;
    let mut entries: Vec<BracketEntry> = l.entries.clone();
    for j in 0..n {
        for k in 0..n {
            let c = d[(k, j)];
            if c != 0.0 {
                // [e_j, xi] = -D e_j
                entries.push(BracketEntry { i: j, j: xi, k, c: -c });
            }
        }
    }
    Ok(LieAlgebra::new(format!("{}-ext", l.name), n + 1, entries)?
        .with_nilradical((0..n).collect())?
        .mark_rational(false))
}
