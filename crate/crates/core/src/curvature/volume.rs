use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::metric::MetricTensor;

/// `h̄`-orthonormal eigenbasis of `beta` (as columns) with eigenvalues sorted
/// non-decreasing.
pub fn beta_eigenbasis(hbar: &MetricTensor, beta: &DMatrix<f64>) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let n = hbar.dim();
    if beta.nrows() != n || beta.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: beta.nrows(),
        });
    }
    let skew = hbar.self_adjoint_residual(beta);
    if skew > 1e-10 {
        return Err(Error::NotSelfAdjoint(skew));
    }
    let frame = hbar.frame();
    let f = crate::linalg::symmetric_part(&hbar.in_frame(beta));
    let eig = f.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    // Stable ordering: ties keep the original basis order.
    order.sort_by(|&a, &b| {
        eig.eigenvalues[a]
            .total_cmp(&eig.eigenvalues[b])
            .then(dominant(&eig.eigenvectors, a).cmp(&dominant(&eig.eigenvectors, b)))
    });
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    Ok((values, frame * vectors))
}

fn dominant(v: &DMatrix<f64>, col: usize) -> usize {
    v.column(col).iamax()
}

/// Diagonal of `E` in `h = exp(E) . h̄`, `E` lower-triangular in the
/// `beta`-eigenbasis.
///
/// With `B` the eigenbasis, `h` in that basis is `exp(-E)^t exp(-E)`, so the
/// Cholesky factor `q q^t` of its inverse is `exp(E)` and `E_ii = log q_ii`.
pub fn triangular_log_diagonal(h: &MetricTensor, basis: &DMatrix<f64>) -> Result<Vec<f64>> {
    let hb = basis.transpose() * h.matrix() * basis;
    let inv = MetricTensor::new(hb)?.inverse();
    let chol = crate::linalg::symmetric_part(&inv)
        .cholesky()
        .ok_or(Error::NotPositiveDefinite)?;
    Ok(chol.l().diagonal().iter().map(|q| q.ln()).collect())
}

/// `v_beta(h) = -(sum beta_i E_ii) / (sum beta_i^2)`.
///
/// A zero `beta` stands for the abelian case, where the volume is identically 0.
pub fn beta_volume(h: &MetricTensor, hbar: &MetricTensor, beta: &DMatrix<f64>) -> Result<f64> {
    let (values, basis) = beta_eigenbasis(hbar, beta)?;
    let norm2: f64 = values.iter().map(|b| b * b).sum();
    if norm2 == 0.0 {
        return Ok(0.0);
    }
    let diag = triangular_log_diagonal(h, &basis)?;
    Ok(-values.iter().zip(&diag).map(|(b, e)| b * e).sum::<f64>() / norm2)
}
