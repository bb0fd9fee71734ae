//! Rank-one Einstein extensions of nilsolitons and their invariants.

mod normality;
mod ode;
mod semidirect;

pub use normality::{normality_check, NormalityReport, NORMALITY_TOL};
pub use ode::{cohomo1_evolution, Cohomo1Evolution, RK4_STEPS_PER_UNIT};
pub use semidirect::{semidirect_metric, CartanSplit, SemidirectMetric};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::curvature::{koszul_connection, ricci_endomorphism};
use crate::error::{Error, Result};
use crate::lie::{semidirect_extend, LieAlgebra};
use crate::linalg;
use crate::metric::MetricTensor;
use crate::soliton::{soliton_residual, SOLITON_TOL};

/// Tolerance for each identity in [`rank_one_invariants`].
pub const INVARIANT_TOL: f64 = 1e-7;

/// `s = R xi + n` with `ad xi|_n = D` and `xi` a unit normal to `n`.
#[derive(Debug, Clone)]
pub struct SolvableExtension {
    pub base: LieAlgebra,
    pub base_metric: MetricTensor,
    /// `beta+` of the base, `Ric + Id` for a nilsoliton at `lambda = -1`.
    pub beta_plus: DMatrix<f64>,
    /// `D = beta+ / |beta+|`.
    pub derivation: DMatrix<f64>,
    /// `1 / |beta+|`.
    pub alpha: f64,
    /// The extension; `xi` is the last basis vector.
    pub algebra: LieAlgebra,
    /// `h` on `n`, `xi` orthonormal to it.
    pub metric: MetricTensor,
}

impl SolvableExtension {
    pub fn xi(&self) -> usize {
        self.base.dim()
    }
}

/// Extension of a nilsoliton normalized to `Ric = -Id + beta+`.
///
/// Abelian bases are flat and take `beta+ = Id`, which yields real hyperbolic
/// space.
pub fn einstein_extension(l: &LieAlgebra, h: &MetricTensor) -> Result<SolvableExtension> {
    let n = l.dim();
    let beta_plus = if l.is_abelian() {
        DMatrix::identity(n, n)
    } else {
        let r = soliton_residual(l, h)?;
        if !r.is_soliton || (r.lambda + 1.0).abs() > SOLITON_TOL {
            return Err(Error::NotNormalizedSoliton {
                lambda: r.lambda,
                residual: r.normalized_residual,
            });
        }
        r.derivation
    };
    let norm = h.endo_norm(&beta_plus);
    let mut ext = one_dimensional_extension(l, h, &(&beta_plus / norm))?;
    ext.beta_plus = beta_plus;
    ext.alpha = 1.0 / norm;
    Ok(ext)
}

/// Extension by an arbitrary derivation `D`, with `beta+` taken as the value
/// `tr(D) D` it would have for an Einstein extension.
pub fn one_dimensional_extension(l: &LieAlgebra, h: &MetricTensor, d: &DMatrix<f64>) -> Result<SolvableExtension> {
    let n = l.dim();
    if h.dim() != n || d.nrows() != n || d.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: if h.dim() != n { h.dim() } else { d.nrows() },
        });
    }
    let algebra = semidirect_extend(l, d)?;
    let beta_plus = d * d.trace();
    let norm = h.endo_norm(&beta_plus);
    Ok(SolvableExtension {
        base: l.clone(),
        base_metric: h.clone(),
        alpha: if norm > 0.0 { 1.0 / norm } else { f64::INFINITY },
        beta_plus,
        derivation: d.clone(),
        algebra,
        metric: block_metric(h.matrix(), &DMatrix::identity(1, 1))?,
    })
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct EinsteinResidual {
    /// `|Ric + Id|` in an orthonormal frame.
    pub residual: f64,
    /// Best constant `scal / dim`.
    pub lambda_fit: f64,
    /// `|Ric - lambda_fit Id|`.
    pub fit_residual: f64,
}

pub fn einstein_residual(s: &LieAlgebra, g: &MetricTensor) -> EinsteinResidual {
    let n = s.dim();
    let r = ricci_endomorphism(s, g);
    let id = DMatrix::<f64>::identity(n, n);
    let lambda_fit = r.scal / n as f64;
    EinsteinResidual {
        residual: g.endo_norm(&(&r.ricci + &id)),
        lambda_fit,
        fit_residual: g.endo_norm(&(&r.ricci - &id * lambda_fit)),
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RankOneInvariants {
    /// `|Ric_n - (-Id + beta+)|`.
    pub fiber_ricci_residual: f64,
    /// Shape operator `L_xi U = -(nabla_U xi)^T` from the Levi-Civita
    /// connection of the extension.
    pub shape_operator: DMatrix<f64>,
    /// `|L_xi - S(ad xi|_n)|`.
    pub killing_residual: f64,
    /// Mean curvature vector of the `n`-orbit, `<N, X> = -tr L_X`.
    pub mean_curvature: DVector<f64>,
    /// `|L_N + beta+|`.
    pub shape_residual: f64,
    pub mean_curvature_norm_sq: f64,
    pub trace_beta_plus: f64,
    pub fiber_scal: f64,
    /// Sum of the positive eigenvalues of `ad A|_n` for `A = -N`.
    pub sigma_plus: f64,
    /// `|scal_n + dim n - sigma+|`.
    pub estimate_residual: f64,
    pub fiber_ricci_passed: bool,
    pub shape_passed: bool,
    pub norm_passed: bool,
    pub estimate_passed: bool,
    pub passed: bool,
}

pub fn rank_one_invariants(x: &SolvableExtension) -> RankOneInvariants {
    let n = x.base.dim();
    let xi = x.xi();
    let h = &x.base_metric;
    let id = DMatrix::<f64>::identity(n, n);

    let fiber = ricci_endomorphism(&x.base, h);
    let fiber_ricci_residual = h.endo_norm(&(&fiber.ricci - (-&id + &x.beta_plus)));

    // g is block diagonal, so the tangent part is the first n coordinates.
    let conn = koszul_connection(&x.algebra, &x.metric);
    let shape_operator = DMatrix::from_fn(n, n, |i, j| -conn.gamma[j][(i, xi)]);
    let ad_xi = x.algebra.ad_basis(xi).view((0, 0), (n, n)).into_owned();
    let sym = (&ad_xi + h.adjoint(&ad_xi)) * 0.5;
    let killing_residual = h.endo_norm(&(&shape_operator - &sym));

    let nu = -shape_operator.trace();
    let mut mean_curvature = DVector::zeros(n + 1);
    mean_curvature[xi] = nu;
    let l_n = &shape_operator * nu;
    let shape_residual = h.endo_norm(&(&l_n + &x.beta_plus));
    let mean_curvature_norm_sq = nu * nu;
    let trace_beta_plus = x.beta_plus.trace();
    let norm_residual = (mean_curvature_norm_sq - trace_beta_plus).abs();

    let ad_a = &ad_xi * -nu;
    let sigma_plus: f64 = h
        .self_adjoint_eigenvalues(&ad_a)
        .into_iter()
        .filter(|&v| v > 0.0)
        .sum();
    let estimate_residual = (fiber.scal + n as f64 - sigma_plus).abs();

    let fiber_ricci_passed = fiber_ricci_residual <= INVARIANT_TOL;
    let shape_passed = shape_residual <= INVARIANT_TOL && killing_residual <= INVARIANT_TOL;
    let norm_passed = norm_residual <= INVARIANT_TOL;
    let estimate_passed = estimate_residual <= INVARIANT_TOL;
    RankOneInvariants {
        fiber_ricci_residual,
        shape_operator,
        killing_residual,
        mean_curvature,
        shape_residual,
        mean_curvature_norm_sq,
        trace_beta_plus,
        fiber_scal: fiber.scal,
        sigma_plus,
        estimate_residual,
        fiber_ricci_passed,
        shape_passed,
        norm_passed,
        estimate_passed,
        passed: fiber_ricci_passed && shape_passed && norm_passed && estimate_passed,
    }
}

/// Block-diagonal metric `h1 + h2`.
pub(crate) fn block_metric(h1: &DMatrix<f64>, h2: &DMatrix<f64>) -> Result<MetricTensor> {
    let (a, b) = (h1.nrows(), h2.nrows());
    let mut g = DMatrix::zeros(a + b, a + b);
    g.view_mut((0, 0), (a, a)).copy_from(h1);
    g.view_mut((a, a), (b, b)).copy_from(h2);
    MetricTensor::new(linalg::symmetric_part(&g))
}
