//! The stratum label `beta` of a nice nilpotent Lie bracket and its
//! properties.

mod criterion;
mod minnorm;

pub use criterion::{einstein_nilradical_criterion, NilradicalVerdict, POSITIVITY_TOL};
pub use minnorm::{min_norm_point, MinNormPoint};

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::curvature::{ricci_endomorphism, triangular_log_diagonal};
use crate::error::{Error, Result};
use crate::lie::{derivation_space, is_derivation, nice_basis_report, LieAlgebra, NiceReport, NiceStructure};
use crate::linalg;
use crate::metric::MetricTensor;

/// `alpha_(i,j,k) = e_k - e_i - e_j`, one per triple.
pub fn weight_vectors(nice: &NiceStructure) -> Vec<DVector<f64>> {
    nice.triples
        .iter()
        .map(|t| {
            let mut a = DVector::zeros(nice.dim);
            a[t.k] += 1.0;
            a[t.i] -= 1.0;
            a[t.j] -= 1.0;
            a
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct BetaLabel {
    /// Diagonal in the nice basis; zero for abelian algebras.
    pub beta: DMatrix<f64>,
    /// `beta / tr beta^2 + Id`, or `Id` for abelian algebras.
    pub beta_plus: DMatrix<f64>,
    /// Eigenvalues of `beta`, non-decreasing.
    pub eigenvalues: Vec<f64>,
    /// `h̄`-orthonormal eigenvectors (columns) in the order of `eigenvalues`.
    pub eigenbasis: DMatrix<f64>,
    /// Convex weights with `beta = sum x_l alpha_l`, in triple order.
    pub weights: Vec<f64>,
    pub kkt_residual: f64,
    pub background: MetricTensor,
    pub abelian: bool,
}

impl BetaLabel {
    pub fn trace(&self) -> f64 {
        self.beta.trace()
    }

    pub fn dim(&self) -> usize {
        self.beta.nrows()
    }

    /// `v_beta(h)` computed with this label's eigenbasis.
    pub fn volume(&self, h: &MetricTensor) -> Result<f64> {
        if self.abelian {
            return Ok(0.0);
        }
        let diag = triangular_log_diagonal(h, &self.eigenbasis)?;
        let norm2: f64 = self.eigenvalues.iter().map(|b| b * b).sum();
        Ok(-self.eigenvalues.iter().zip(&diag).map(|(b, e)| b * e).sum::<f64>() / norm2)
    }

    /// `m` read in the eigenbasis, mapped back to the nice basis.
    pub fn from_eigenbasis(&self, m: &DMatrix<f64>) -> DMatrix<f64> {
        let b = &self.eigenbasis;
        b * m * b.clone().try_inverse().expect("eigenbasis is invertible")
    }

    /// `B^{-1} q B`.
    pub fn to_eigenbasis(&self, q: &DMatrix<f64>) -> DMatrix<f64> {
        let b = &self.eigenbasis;
        b.clone().try_inverse().expect("eigenbasis is invertible") * q * b
    }

    /// Random element of the lower-triangular group `B_beta`.
    pub fn random_factor<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> DMatrix<f64> {
        self.from_eigenbasis(&linalg::random_lower_triangular(rng, self.dim()))
    }

    /// Transpose with respect to the background.
    pub fn background_transpose(&self, e: &DMatrix<f64>) -> DMatrix<f64> {
        self.background.adjoint(e)
    }
}

/// Computes `beta` as the minimum-norm point of the weight hull.
///
/// The background must be diagonal in the nice basis.
pub fn beta_label(l: &LieAlgebra, hbar: &MetricTensor) -> Result<BetaLabel> {
    let n = l.dim();
    if hbar.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: hbar.dim(),
        });
    }
    if !l.is_nilpotent() {
        return Err(Error::NotNilpotent(l.name().to_string()));
    }
    let off = DMatrix::from_fn(n, n, |i, j| if i == j { 0.0 } else { hbar.matrix()[(i, j)] }).amax();
    if off > 1e-12 {
        return Err(Error::Unsupported(
            "background inner product must be diagonal in the nice basis".into(),
        ));
    }
    let nice = match nice_basis_report(l) {
        NiceReport::Nice(s) => s,
        NiceReport::NotNice(w) => return Err(Error::NotNice(format!("{w:?}"))),
    };
    let scale = DVector::from_fn(n, |i, _| hbar.matrix()[(i, i)].sqrt().recip());
    if nice.is_empty() {
        return Ok(BetaLabel {
            beta: DMatrix::zeros(n, n),
            beta_plus: DMatrix::identity(n, n),
            eigenvalues: vec![0.0; n],
            eigenbasis: DMatrix::from_diagonal(&scale),
            weights: Vec::new(),
            kkt_residual: 0.0,
            background: hbar.clone(),
            abelian: true,
        });
    }
    let mnp = min_norm_point(&weight_vectors(&nice));
    let beta = DMatrix::from_diagonal(&mnp.point);
    let tr2 = mnp.point.norm_squared();
    let beta_plus = &beta / tr2 + DMatrix::identity(n, n);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| mnp.point[a].total_cmp(&mnp.point[b]).then(a.cmp(&b)));
    let eigenvalues = order.iter().map(|&i| mnp.point[i]).collect();
    let eigenbasis = DMatrix::from_fn(n, n, |r, c| if r == order[c] { scale[r] } else { 0.0 });
    Ok(BetaLabel {
        beta,
        beta_plus,
        eigenvalues,
        eigenbasis,
        weights: mnp.weights,
        kkt_residual: mnp.kkt_residual,
        background: hbar.clone(),
        abelian: false,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BetaPropertiesReport {
    pub trace_beta: f64,
    /// `|tr beta+ - tr (beta+)^2|`.
    pub trace_identity_residual: f64,
    /// Smallest eigenvalue of `beta+`.
    pub beta_plus_min_eigenvalue: f64,
    /// Largest `|tr(D q beta q^{-1})|` relative to `1 + |D| |q beta q^{-1}|`.
    pub derivation_trace_max: f64,
    /// Smallest `tr [E, E^T] beta` over random lower-triangular `E`.
    pub commutator_min: f64,
    /// Largest `|tr [E, E^T] beta|` over samples with `[E, beta] = 0`.
    pub commutator_equality_max: f64,
    /// Smallest `tr [E, E^T] beta / |[E, beta]|^2` over samples with
    /// `[E, beta] != 0`; positive when the equality case is sharp.
    pub commutator_strict_ratio_min: f64,
    pub samples: usize,
    pub passed: bool,
}

/// Checks `tr beta = -1`, `tr beta+ = tr (beta+)^2`, `beta+ > 0`,
/// `tr(D q beta q^{-1}) = 0` for derivations `D` and lower-triangular `q`, and
/// `tr [E, E^T] beta >= 0` for lower-triangular `E`, equality iff `[E, beta] = 0`.
pub fn beta_properties_check(b: &BetaLabel, l: &LieAlgebra, samples: usize, seed: u64) -> BetaPropertiesReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = b.dim();
    let bp = &b.beta_plus;
    let trace_identity_residual = (bp.trace() - (bp * bp).trace()).abs();
    let beta_plus_min_eigenvalue = b.background.self_adjoint_eigenvalues(bp)[0];
    if b.abelian {
        return BetaPropertiesReport {
            trace_beta: 0.0,
            trace_identity_residual,
            beta_plus_min_eigenvalue,
            derivation_trace_max: 0.0,
            commutator_min: 0.0,
            commutator_equality_max: 0.0,
            commutator_strict_ratio_min: f64::INFINITY,
            samples: 0,
            passed: trace_identity_residual <= 1e-14 && beta_plus_min_eigenvalue > 0.0,
        };
    }

    let ders = derivation_space(l).basis;
    let mut derivation_trace_max = 0.0_f64;
    for s in 0..=samples {
        let q = if s == 0 {
            DMatrix::identity(n, n)
        } else {
            b.random_factor(&mut rng)
        };
        let qbq = &q * &b.beta * q.clone().try_inverse().expect("triangular with positive diagonal");
        for d in &ders {
            let v = (d * &qbq).trace().abs() / (1.0 + d.norm() * qbq.norm());
            derivation_trace_max = derivation_trace_max.max(v);
        }
    }

    let ev = &b.eigenvalues;
    let mut commutator_min = f64::INFINITY;
    let mut commutator_equality_max = 0.0_f64;
    let mut commutator_strict_ratio_min = f64::INFINITY;
    let eval = |m: &DMatrix<f64>| -> (f64, f64) {
        let e = b.from_eigenbasis(m);
        let et = b.background_transpose(&e);
        let val = ((&e * &et - &et * &e) * &b.beta).trace();
        let comm = (&e * &b.beta - &b.beta * &e).norm();
        (val, comm)
    };
    for _ in 0..samples {
        let m = linalg::random_lower_triangular(&mut rng, n);
        let (val, comm) = eval(&m);
        commutator_min = commutator_min.min(val);
        if comm > 1e-9 {
            commutator_strict_ratio_min = commutator_strict_ratio_min.min(val / (comm * comm));
        }
        // Keep only the entries inside eigenvalue blocks: then [E, beta] = 0.
        let block = DMatrix::from_fn(n, n, |r, c| {
            if (ev[r] - ev[c]).abs() <= 1e-12 {
                m[(r, c)]
            } else {
                0.0
            }
        });
        let (val, comm) = eval(&block);
        debug_assert!(comm < 1e-9);
        commutator_min = commutator_min.min(val);
        commutator_equality_max = commutator_equality_max.max(val.abs());
    }

    let trace_beta = b.trace();
    let passed = (trace_beta + 1.0).abs() <= 1e-12
        && trace_identity_residual <= 1e-14
        && beta_plus_min_eigenvalue > 0.0
        && derivation_trace_max <= 1e-10
        && commutator_min >= -1e-12
        && commutator_equality_max <= 1e-12
        && commutator_strict_ratio_min > 0.0;
    BetaPropertiesReport {
        trace_beta,
        trace_identity_residual,
        beta_plus_min_eigenvalue,
        derivation_trace_max,
        commutator_min,
        commutator_equality_max,
        commutator_strict_ratio_min,
        samples,
        passed,
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct GitEstimate {
    /// `tr Ric(q . h̄) q beta+ q^{-1}`.
    pub value: f64,
    pub conjugate_is_derivation: bool,
    pub derivation_residual: f64,
}

/// Evaluates the Ricci estimate at `h = q . h̄` with `q` lower-triangular in
/// the eigenbasis of `beta`.
pub fn git_estimate_check(l: &LieAlgebra, q: &DMatrix<f64>, b: &BetaLabel) -> Result<GitEstimate> {
    let n = l.dim();
    if q.nrows() != n || q.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: q.nrows(),
        });
    }
    let inner = b.to_eigenbasis(q);
    let upper = DMatrix::from_fn(n, n, |r, c| if c > r { inner[(r, c)] } else { 0.0 }).amax();
    if upper > 1e-12 * inner.amax().max(1.0) || (0..n).any(|i| inner[(i, i)] <= 0.0) {
        return Err(Error::Unsupported(
            "q must be lower triangular with positive diagonal in the beta eigenbasis".into(),
        ));
    }
    let h = MetricTensor::from_factor(&b.background, q)?;
    let qinv = q.clone().try_inverse().ok_or(Error::NotPositiveDefinite)?;
    let e = q * &b.beta_plus * qinv;
    let value = (ricci_endomorphism(l, &h).ricci * &e).trace();
    let d = is_derivation(l, &e)?;
    let derivation_residual = d.residual;
    Ok(GitEstimate {
        value,
        conjugate_is_derivation: derivation_residual <= 1e-9,
        derivation_residual,
    })
}

/// Smallest GIT estimate over random factors of `B_beta`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct GitSweep {
    pub samples: usize,
    pub min_value: f64,
    /// Estimate at `q = Id`.
    pub identity: GitEstimate,
    /// Every sample is at least `-1e-10`.
    pub passed: bool,
}

pub fn git_estimate_sweep(l: &LieAlgebra, b: &BetaLabel, samples: usize, seed: u64) -> Result<GitSweep> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let identity = git_estimate_check(l, &DMatrix::identity(l.dim(), l.dim()), b)?;
    let mut min_value = identity.value;
    for _ in 0..samples {
        let q = b.random_factor(&mut rng);
        min_value = min_value.min(git_estimate_check(l, &q, b)?.value);
    }
    Ok(GitSweep {
        samples,
        min_value,
        identity,
        passed: min_value >= -1e-10,
    })
}
