use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lie::LieAlgebra;
use crate::metric::MetricTensor;

pub const NORMALITY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NormalityReport {
    /// `ad xi` restricted to the nilradical, in the nilradical basis.
    pub operator: DMatrix<f64>,
    /// `|[A, A^T]|` in a `g|_n`-orthonormal frame.
    pub commutator_norm: f64,
    pub normal: bool,
}

/// Whether `A = ad xi|_n` commutes with its `g|_n`-transpose, with `n` the
/// declared nilradical.
pub fn normality_check(s: &LieAlgebra, g: &MetricTensor, xi: usize) -> Result<NormalityReport> {
    let dim = s.dim();
    if g.dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: g.dim(),
        });
    }
    if xi >= dim {
        return Err(Error::IndexOutOfRange { index: xi + 1, dim });
    }
    let nil = s
        .nilradical()
        .ok_or_else(|| Error::Unsupported(format!("algebra `{}` declares no nilradical", s.name())))?;
    if nil.contains(&xi) {
        return Err(Error::Unsupported(format!("e{} lies in the nilradical", xi + 1)));
    }
    let ad = s.ad_basis(xi);
    let leak = (0..dim)
        .filter(|r| !nil.contains(r))
        .flat_map(|r| nil.iter().map(move |&c| (r, c)))
        .map(|(r, c)| ad[(r, c)].abs())
        .fold(0.0, f64::max);
    if leak > 1e-12 {
        return Err(Error::Hypothesis {
            what: "declared nilradical is not ad-invariant".into(),
            residual: leak,
        });
    }
    let a = DMatrix::from_fn(nil.len(), nil.len(), |r, c| ad[(nil[r], nil[c])]);
    let hn = MetricTensor::new(DMatrix::from_fn(nil.len(), nil.len(), |r, c| g.matrix()[(nil[r], nil[c])]))?;
    let at = hn.adjoint(&a);
    let commutator_norm = hn.endo_norm(&(&a * &at - &at * &a));
    Ok(NormalityReport {
        operator: a,
        commutator_norm,
        normal: commutator_norm <= NORMALITY_TOL,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::catalog;

    /// `e1` unit and orthogonal to `n`; `n` has orthonormal frame `p` (columns).
    fn metric_with_frame(p: &DMatrix<f64>) -> MetricTensor {
        let pinv = p.clone().try_inverse().unwrap();
        let hn = pinv.transpose() * pinv;
        let mut g = DMatrix::zeros(4, 4);
        g[(0, 0)] = 1.0;
        g.view_mut((1, 1), (3, 3)).copy_from(&hn);
        MetricTensor::new(g).unwrap()
    }

    #[test]
    fn standard_inner_product_is_normal() {
        let r = normality_check(&catalog::s4(), &MetricTensor::identity(4), 0).unwrap();
        assert!(r.normal);
        assert_eq!(r.operator, DMatrix::from_row_slice(3, 3, &[1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 2.0]));
    }

    #[test]
    fn skewed_frame_is_not_normal() {
        // orthonormal basis e2, e3 + e4, e4
        let p = DMatrix::from_row_slice(3, 3, &[1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 1.0, 1.0]);
        let r = normality_check(&catalog::s4(), &metric_with_frame(&p), 0).unwrap();
        assert!(!r.normal);
        assert!(r.commutator_norm > 0.1);
    }

    #[test]
    fn missing_nilradical_is_reported() {
        assert!(normality_check(&catalog::h3(), &MetricTensor::identity(3), 0).is_err());
    }
}
