use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::beta::{einstein_nilradical_criterion, weight_vectors};
use crate::error::{Error, Result};
use crate::lie::{LieAlgebra, NiceStructure};
use crate::linalg;
use crate::metric::MetricTensor;

/// A nilsoliton obtained by rescaling a nice basis.
#[derive(Debug, Clone)]
pub struct NiceSoliton {
    /// The algebra in the rescaled basis `e'_i = s_i e_i`; the identity metric
    /// on it is a nilsoliton with `lambda = -1`.
    pub algebra: LieAlgebra,
    pub scaling: Vec<f64>,
    /// The same nilsoliton written in the original basis, `diag(1 / s_i^2)`.
    pub metric: MetricTensor,
    /// Rescaled constants, one per triple.
    pub constants: Vec<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
struct NewtonStats {
    iterations: usize,
    gradient: f64,
}

/// Rescales the nice basis so that the squared constants become `2 x_l`, up
/// to the kernel of the Gram matrix.
///
/// Diagonal rescaling multiplies `c_l` by `exp(-<t, alpha_l>)`, so
/// `y_l = c_l^2 / 2` moves as `y_l(t) = y_l(0) exp(-2 <t, alpha_l>)`. The
/// diagonal orthonormal metric is a soliton with `lambda = -1` exactly when
/// `sum y_l alpha_l = sum x_l alpha_l`, the critical point of the convex
/// function `F(t) = 1/2 sum y_l(t) + <t, sum x_l alpha_l>`.
pub fn nilsoliton_from_nice(nice: &NiceStructure, x: &[f64]) -> Result<NiceSoliton> {
    let n = nice.dim;
    let m = nice.len();
    if x.len() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            found: x.len(),
        });
    }
    if m == 0 {
        let algebra = nice.with_constants("nilsoliton", &[])?;
        return Ok(NiceSoliton {
            algebra,
            scaling: vec![1.0; n],
            metric: MetricTensor::identity(n),
            constants: Vec::new(),
        });
    }
    let crit = einstein_nilradical_criterion(nice);
    if x.iter().any(|&v| v <= 0.0) {
        return Err(Error::NoNilsoliton("solution must be componentwise positive".into()));
    }
    let ux = &crit.gram * DVector::from_row_slice(x) - DVector::from_element(m, 1.0);
    if ux.amax() > 1e-9 {
        return Err(Error::NoNilsoliton(format!("U x = 1 violated by {:.3e}", ux.amax())));
    }

    let alphas = weight_vectors(nice);
    let a = DMatrix::from_fn(m, n, |l, i| alphas[l][i]);
    let target = a.transpose() * DVector::from_row_slice(x);
    let y0 = DVector::from_iterator(m, nice.triples.iter().map(|t| 0.5 * t.c * t.c));
    let ys = |t: &DVector<f64>| -> DVector<f64> {
        let at = &a * t;
        DVector::from_fn(m, |l, _| y0[l] * (-2.0 * at[l]).exp())
    };
    let f = |t: &DVector<f64>| 0.5 * ys(t).sum() + t.dot(&target);

    let mut t = DVector::zeros(n);
    let mut stats = NewtonStats {
        iterations: 0,
        gradient: f64::INFINITY,
    };
    for it in 0..200 {
        let y = ys(&t);
        let grad = &target - a.transpose() * &y;
        stats = NewtonStats {
            iterations: it,
            gradient: grad.amax(),
        };
        if stats.gradient <= 1e-14 {
            break;
        }
        let hess = a.transpose() * DMatrix::from_diagonal(&(&y * 2.0)) * &a;
        let step = -linalg::lstsq(&hess, &grad);
        let f0 = f(&t);
        let slope = grad.dot(&step);
        let mut s = 1.0;
        loop {
            let cand = &t + &step * s;
            if f(&cand) <= f0 + 1e-4 * s * slope || s < 1e-12 {
                t = cand;
                break;
            }
            s *= 0.5;
        }
    }
    if stats.gradient > 1e-10 {
        return Err(Error::NonConvergence {
            iterations: stats.iterations,
            residual: stats.gradient,
        });
    }

    let y = ys(&t);
    let constants: Vec<f64> = nice
        .triples
        .iter()
        .zip(y.iter())
        .map(|(tr, &yl)| tr.c.signum() * (2.0 * yl).sqrt())
        .collect();
    let scaling: Vec<f64> = t.iter().map(|v| v.exp()).collect();
    let metric = MetricTensor::new(DMatrix::from_diagonal(&DVector::from_iterator(
        n,
        scaling.iter().map(|s| 1.0 / (s * s)),
    )))?;
    let algebra = nice.with_constants("nilsoliton", &constants)?;
    Ok(NiceSoliton {
        algebra,
        scaling,
        metric,
        constants,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::{catalog, nice_basis_report};
    use crate::soliton::soliton_residual;

    fn nice(l: &LieAlgebra) -> NiceStructure {
        nice_basis_report(l).structure().unwrap().clone()
    }

    #[test]
    fn heisenberg() {
        let s = nilsoliton_from_nice(&nice(&catalog::h3()), &[1.0 / 3.0]).unwrap();
        assert!((s.constants[0].powi(2) - 2.0 / 3.0).abs() < 1e-14);
        let r = soliton_residual(&s.algebra, &MetricTensor::identity(3)).unwrap();
        assert!((r.lambda + 1.0).abs() < 1e-12);
        assert!(r.residual <= 1e-8);
        let r = soliton_residual(&catalog::h3(), &s.metric).unwrap();
        assert!(r.is_soliton);
        assert!((r.lambda + 1.0).abs() < 1e-12);
    }

    #[test]
    fn filiform() {
        let s = nilsoliton_from_nice(&nice(&catalog::n4()), &[1.0 / 3.0, 1.0 / 3.0]).unwrap();
        for c in &s.constants {
            assert!((c * c - 2.0 / 3.0).abs() < 1e-13);
        }
        let r = soliton_residual(&s.algebra, &MetricTensor::identity(4)).unwrap();
        assert!(r.residual <= 1e-8);
        assert!(r.beta_plus_deviation.unwrap() < 1e-7);
    }

    #[test]
    fn rejects_bad_solutions() {
        let n = nice(&catalog::n4());
        assert!(matches!(nilsoliton_from_nice(&n, &[0.25, 0.25]), Err(Error::NoNilsoliton(_))));
        assert!(matches!(nilsoliton_from_nice(&n, &[0.5, -0.1]), Err(Error::NoNilsoliton(_))));
    }

    #[test]
    fn abelian_unchanged() {
        let s = nilsoliton_from_nice(&nice(&LieAlgebra::abelian(2)), &[]).unwrap();
        assert!(s.algebra.is_abelian());
        assert_eq!(s.metric.matrix(), &DMatrix::identity(2, 2));
    }
}
