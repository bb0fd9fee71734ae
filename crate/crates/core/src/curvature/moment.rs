use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::lie::{LieAlgebra, StructureTensor};
use crate::metric::MetricTensor;

/// `tau(E) mu = E mu(.,.) - mu(E.,.) - mu(.,E.)`.
pub fn tau_action(e: &DMatrix<f64>, mu: &StructureTensor) -> StructureTensor {
    mu.tau(e)
}

/// `<<mu, lambda>>_h`, summed over all ordered pairs of an `h`-orthonormal basis.
pub fn bracket_inner_product(mu: &StructureTensor, lambda: &StructureTensor, h: &MetricTensor) -> f64 {
    mu.inner(lambda, h)
}

/// `1/4 <<tau(E) mu, mu>>_h`, which equals `tr Ric(h) E` on nilpotent algebras.
pub fn moment_map_ricci(l: &LieAlgebra, h: &MetricTensor, e: &DMatrix<f64>) -> Result<f64> {
    if !l.is_nilpotent() {
        return Err(Error::NotNilpotent(l.name().to_string()));
    }
    let mu = l.structure();
    Ok(0.25 * mu.tau(e).inner(mu, h))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curvature::ricci_endomorphism;
    use crate::lie::catalog;
    use nalgebra::DVector;

    #[test]
    fn heisenberg_norm_and_scal() {
        let h3 = catalog::h3();
        let id = MetricTensor::identity(3);
        assert!((bracket_inner_product(h3.structure(), h3.structure(), &id) - 2.0).abs() < 1e-15);
        let m = moment_map_ricci(&h3, &id, &DMatrix::identity(3, 3)).unwrap();
        assert!((m + 0.5).abs() < 1e-15);
        let d = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 1.0, 2.0]));
        assert_eq!(tau_action(&d, h3.structure()).max_abs(), 0.0);
        assert_eq!(moment_map_ricci(&h3, &id, &d).unwrap(), 0.0);
        let neg = tau_action(&DMatrix::identity(3, 3), h3.structure());
        assert_eq!((&neg + h3.structure()).max_abs(), 0.0);
    }

    #[test]
    fn equivariance_with_diagonal_q() {
        let h3 = catalog::h3();
        let mu = h3.structure();
        let h = MetricTensor::new(DMatrix::from_row_slice(3, 3, &[1.5, 0.2, 0.0, 0.2, 1.0, 0.1, 0.0, 0.1, 0.7])).unwrap();
        let q = DMatrix::from_diagonal(&DVector::from_vec(vec![2.0, 1.0, 1.0]));
        let qinv = q.clone().try_inverse().unwrap();
        let lhs = bracket_inner_product(mu, mu, &h.act(&q).unwrap());
        let moved = mu.act(&qinv);
        let rhs = bracket_inner_product(&moved, &moved, &h);
        assert!((lhs - rhs).abs() < 1e-12);
    }

    #[test]
    fn rejects_non_nilpotent() {
        let hyp = catalog::hyperbolic_plane();
        assert!(matches!(
            moment_map_ricci(&hyp, &MetricTensor::identity(2), &DMatrix::identity(2, 2)),
            Err(Error::NotNilpotent(_))
        ));
    }

    #[test]
    fn matches_oracle_on_filiform() {
        let n4 = catalog::n4();
        let h = MetricTensor::new(DMatrix::from_row_slice(
            4,
            4,
            &[1.0, 0.2, 0.0, 0.1, 0.2, 2.0, 0.3, 0.0, 0.0, 0.3, 1.0, 0.0, 0.1, 0.0, 0.0, 0.5],
        ))
        .unwrap();
        let e = DMatrix::from_fn(4, 4, |i, j| ((i * 4 + j) as f64 * 0.37).sin());
        let ric = ricci_endomorphism(&n4, &h).ricci;
        assert!(((&ric * &e).trace() - moment_map_ricci(&n4, &h, &e).unwrap()).abs() < 1e-12);
    }
}
