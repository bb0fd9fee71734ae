//! Inner products on a Lie algebra and the linear action on them.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const SYMMETRY_TOL: f64 = 1e-12;

/// A symmetric positive-definite bilinear form `h_ij = h(e_i, e_j)`.
///
/// When built from a factorization the metric remembers the background
/// `hbar` and the factor `q` with `h = q . hbar = hbar(q^{-1} ., q^{-1} .)`.
#[derive(Debug, Clone)]
pub struct MetricTensor {
    matrix: DMatrix<f64>,
    lower: DMatrix<f64>,
    factor: Option<Factorization>,
}

#[derive(Debug, Clone)]
pub struct Factorization {
    pub background: DMatrix<f64>,
    pub q: DMatrix<f64>,
}

impl MetricTensor {
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch {
                expected: matrix.nrows(),
                found: matrix.ncols(),
            });
        }
        let scale = matrix.amax().max(1.0);
        let asym = (&matrix - matrix.transpose()).amax();
        if asym > SYMMETRY_TOL * scale {
            return Err(Error::NotSymmetric(asym));
        }
        let sym = crate::linalg::symmetric_part(&matrix);
        let chol = sym.clone().cholesky().ok_or(Error::NotPositiveDefinite)?;
        let lower = chol.l();
        if (0..lower.nrows()).any(|i| lower[(i, i)] <= 0.0 || !lower[(i, i)].is_finite()) {
            return Err(Error::NotPositiveDefinite);
        }
        Ok(Self {
            matrix: sym,
            lower,
            factor: None,
        })
    }

    pub fn identity(n: usize) -> Self {
        Self::new(DMatrix::identity(n, n)).expect("identity is positive definite")
    }

    /// `h = q . background`.
    pub fn from_factor(background: &MetricTensor, q: &DMatrix<f64>) -> Result<Self> {
        let n = background.dim();
        if q.nrows() != n || q.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: q.nrows(),
            });
        }
        let mut h = background.act(q)?;
        h.factor = Some(Factorization {
            background: background.matrix.clone(),
            q: q.clone(),
        });
        Ok(h)
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn factorization(&self) -> Option<&Factorization> {
        self.factor.as_ref()
    }

    pub fn inverse(&self) -> DMatrix<f64> {
        let linv = self.lower_inverse();
        linv.transpose() * linv
    }

    fn lower_inverse(&self) -> DMatrix<f64> {
        self.lower
            .clone()
            .try_inverse()
            .expect("cholesky factor is invertible")
    }

    /// Columns form an `h`-orthonormal basis: `P^T H P = I`.
    pub fn frame(&self) -> DMatrix<f64> {
        self.lower_inverse().transpose()
    }

    /// Inverse of [`frame`](Self::frame), namely `L^T`.
    pub fn frame_inverse(&self) -> DMatrix<f64> {
        self.lower.transpose()
    }

    pub fn inner(&self, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        (x.transpose() * &self.matrix * y)[(0, 0)]
    }

    /// `h`-adjoint `E^T = H^{-1} E^t H`.
    pub fn adjoint(&self, e: &DMatrix<f64>) -> DMatrix<f64> {
        self.inverse() * e.transpose() * &self.matrix
    }

    /// Endomorphism expressed in the orthonormal frame, `P^{-1} E P`.
    pub fn in_frame(&self, e: &DMatrix<f64>) -> DMatrix<f64> {
        self.frame_inverse() * e * self.frame()
    }

    /// Basis-independent Frobenius norm of an endomorphism, `sqrt(tr E E^T)`.
    pub fn endo_norm(&self, e: &DMatrix<f64>) -> f64 {
        self.in_frame(e).norm()
    }

    /// Distance of `e` from being `h`-self-adjoint.
    pub fn self_adjoint_residual(&self, e: &DMatrix<f64>) -> f64 {
        let f = self.in_frame(e);
        (&f - f.transpose()).norm()
    }

    /// `q . h = h(q^{-1} ., q^{-1} .)`.
    pub fn act(&self, q: &DMatrix<f64>) -> Result<Self> {
        let qinv = q
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::Unsupported("singular change of basis".into()))?;
        Self::new(qinv.transpose() * &self.matrix * qinv)
    }

    pub fn scaled(&self, t: f64) -> Result<Self> {
        Self::new(&self.matrix * t)
    }

    pub fn determinant(&self) -> f64 {
        self.lower.diagonal().iter().map(|d| d * d).product()
    }

    /// Rescaled to unit determinant.
    pub fn unimodular_normalized(&self) -> Self {
        let n = self.dim() as f64;
        self.scaled(self.determinant().powf(-1.0 / n))
            .expect("positive rescaling keeps positivity")
    }

    /// Symmetric eigenvalues of an `h`-self-adjoint endomorphism (its
    /// self-adjoint part otherwise), ascending.
    pub fn self_adjoint_eigenvalues(&self, e: &DMatrix<f64>) -> Vec<f64> {
        let f = crate::linalg::symmetric_part(&self.in_frame(e));
        let mut ev: Vec<f64> = f.symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(|a, b| a.total_cmp(b));
        ev
    }
}

/// Tangent action `(rho(E) h)(x, y) = -h(Ex, y) - h(x, Ey)`.
pub fn rho_action(e: &DMatrix<f64>, h: &MetricTensor) -> DMatrix<f64> {
    let hm = h.matrix();
    -(e.transpose() * hm + hm * e)
}

/// Metric file contents: `{"algebra": "...", "matrix": [[...], ...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MetricFile {
    #[serde(default)]
    pub algebra: Option<String>,
    pub matrix: Vec<Vec<f64>>,
}

impl MetricFile {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_metric(&self) -> Result<MetricTensor> {
        let n = self.matrix.len();
        if let Some(row) = self.matrix.iter().find(|r| r.len() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: row.len(),
            });
        }
        MetricTensor::new(DMatrix::from_fn(n, n, |i, j| self.matrix[i][j]))
    }

    pub fn from_metric(algebra: Option<&str>, h: &MetricTensor) -> Self {
        let m = h.matrix();
        Self {
            algebra: algebra.map(str::to_string),
            matrix: (0..m.nrows())
                .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
                .collect(),
        }
    }
}
