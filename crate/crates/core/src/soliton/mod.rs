//! Nilsoliton detection and construction.

mod flow;
mod nice;

pub use flow::{nilsoliton_flow, FlowOptions, FlowResult};
pub use nice::{nilsoliton_from_nice, NiceSoliton};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::beta::beta_label;
use crate::curvature::ricci_endomorphism;
use crate::error::{Error, Result};
use crate::lie::{derivation_space, DerivationSpace, LieAlgebra};
use crate::metric::MetricTensor;

/// Threshold on the normalized residual for calling a metric a nilsoliton.
pub const SOLITON_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolitonReport {
    pub lambda: f64,
    pub derivation: DMatrix<f64>,
    /// `|Ric - lambda Id - D|` in an orthonormal frame.
    pub residual: f64,
    /// Residual divided by `|scal|`, which makes it scale invariant; equal to
    /// the residual itself for flat metrics.
    pub normalized_residual: f64,
    pub is_soliton: bool,
    /// Largest gap between the sorted eigenvalues of `D / |lambda|` and of
    /// `beta+`, when `beta` is available.
    pub beta_plus_deviation: Option<f64>,
}

/// Projects `Ric(h)` onto `R Id + Der` by least squares.
pub fn soliton_residual(l: &LieAlgebra, h: &MetricTensor) -> Result<SolitonReport> {
    if !l.is_nilpotent() {
        return Err(Error::NotNilpotent(l.name().to_string()));
    }
    let der = derivation_space(l);
    let mut report = residual_with(l, h, &der);
    report.beta_plus_deviation = beta_comparison(l, h, &report);
    Ok(report)
}

pub(crate) fn residual_with(l: &LieAlgebra, h: &MetricTensor, der: &DerivationSpace) -> SolitonReport {
    let n = l.dim();
    let curv = ricci_endomorphism(l, h);
    let ric = curv.ricci;
    let (lambda, d) = der.project_with_identity(&ric, &h.frame(), &h.frame_inverse());
    let residual = h.endo_norm(&(&ric - DMatrix::identity(n, n) * lambda - &d));
    let normalized_residual = if curv.scal.abs() > f64::MIN_POSITIVE {
        residual / curv.scal.abs()
    } else {
        residual
    };
    SolitonReport {
        lambda,
        derivation: d,
        residual,
        normalized_residual,
        is_soliton: normalized_residual <= SOLITON_TOL,
        beta_plus_deviation: None,
    }
}

fn beta_comparison(l: &LieAlgebra, h: &MetricTensor, r: &SolitonReport) -> Option<f64> {
    if !r.is_soliton || r.lambda >= -1e-12 {
        return None;
    }
    let n = l.dim();
    let b = beta_label(l, &MetricTensor::identity(n)).ok()?;
    let mut target: Vec<f64> = b.beta_plus.diagonal().iter().copied().collect();
    target.sort_by(f64::total_cmp);
    let ev = h.self_adjoint_eigenvalues(&(&r.derivation / r.lambda.abs()));
    Some(target.iter().zip(&ev).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
}
