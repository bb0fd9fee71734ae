use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lie::{is_derivation, LieAlgebra};
use crate::linalg::expm;
use crate::metric::MetricTensor;

/// Fixed RK4 resolution, so integrations are reproducible.
pub const RK4_STEPS_PER_UNIT: usize = 1000;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Cohomo1Evolution {
    pub t: f64,
    /// `exp(-tD) . h_p = exp(tD)^T h_p exp(tD)`.
    pub closed_form: DMatrix<f64>,
    /// RK4 solution of `dh/dt = -rho(D) h = D^T h + h D`.
    pub integrated: DMatrix<f64>,
    /// Largest entrywise gap between the two.
    pub deviation: f64,
    pub steps: usize,
}

/// Metrics along the normal geodesic of a rank-one extension.
pub fn cohomo1_evolution(l: &LieAlgebra, h_p: &MetricTensor, d: &DMatrix<f64>, t: f64) -> Result<Cohomo1Evolution> {
    let check = is_derivation(l, d)?;
    if !check.is_derivation {
        return Err(Error::NotADerivation {
            residual: check.residual,
        });
    }
    let closed_form = h_p.act(&expm(&(d * -t)))?.matrix().clone();
    let steps = ((t.abs() * RK4_STEPS_PER_UNIT as f64).ceil() as usize).max(1);
    let dt = t / steps as f64;
    let field = |h: &DMatrix<f64>| d.transpose() * h + h * d;
    let mut h = h_p.matrix().clone();
    for _ in 0..steps {
        let k1 = field(&h);
        let k2 = field(&(&h + &k1 * (dt / 2.0)));
        let k3 = field(&(&h + &k2 * (dt / 2.0)));
        let k4 = field(&(&h + &k3 * dt));
        h += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0);
    }
    Ok(Cohomo1Evolution {
        t,
        deviation: (&closed_form - &h).amax(),
        closed_form,
        integrated: h,
        steps,
    })
}
