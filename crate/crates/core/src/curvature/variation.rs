use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::koszul::ricci_endomorphism;
use crate::error::{Error, Result};
use crate::lie::LieAlgebra;
use crate::linalg::expm;
use crate::metric::MetricTensor;

/// Step of the central differences.
pub const FD_STEP: f64 = 1e-5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VariationCheck {
    pub analytic: f64,
    pub numeric: f64,
}

impl VariationCheck {
    pub fn deviation(&self) -> f64 {
        (self.analytic - self.numeric).abs()
    }
}

/// `exp(-tE) . h`, a curve through `h` with velocity `rho(E) h`.
pub fn variation_curve(h: &MetricTensor, e: &DMatrix<f64>, t: f64) -> Result<MetricTensor> {
    let g = expm(&(e * -t));
    MetricTensor::new(crate::linalg::symmetric_part(&(g.transpose() * h.matrix() * g)))
}

fn central_difference(h: &MetricTensor, e: &DMatrix<f64>, f: impl Fn(&MetricTensor) -> f64) -> Result<f64> {
    let plus = f(&variation_curve(h, e, FD_STEP)?);
    let minus = f(&variation_curve(h, e, -FD_STEP)?);
    Ok((plus - minus) / (2.0 * FD_STEP))
}

/// `(d scal)_h (rho(E) h) = 2 tr Ric(h) E`, for unimodular algebras.
pub fn scal_variation_check(l: &LieAlgebra, h: &MetricTensor, e: &DMatrix<f64>) -> Result<VariationCheck> {
    if !l.is_unimodular() {
        return Err(Error::NotUnimodular(l.name().to_string()));
    }
    let ric = ricci_endomorphism(l, h).ricci;
    let analytic = 2.0 * (ric * e).trace();
    let numeric = central_difference(h, e, |g| ricci_endomorphism(l, g).scal)?;
    Ok(VariationCheck { analytic, numeric })
}

/// `tr((dRic)_h(rho(E) h)) E = -1/2 |tau(E) mu|^2_h` for nilpotent algebras and
/// `h`-self-adjoint `E`.
pub fn ric_variation_check(l: &LieAlgebra, h: &MetricTensor, e: &DMatrix<f64>) -> Result<VariationCheck> {
    if !l.is_nilpotent() {
        return Err(Error::NotNilpotent(l.name().to_string()));
    }
    let skew = h.self_adjoint_residual(e);
    if skew > 1e-10 * e.amax().max(1.0) {
        return Err(Error::NotSelfAdjoint(skew));
    }
    let analytic = -0.5 * l.structure().tau(e).norm_squared(h);
    let numeric = central_difference(h, e, |g| (ricci_endomorphism(l, g).ricci * e).trace())?;
    Ok(VariationCheck { analytic, numeric })
}
