use std::collections::BTreeMap;

use faer::prelude::*;
use faer::sparse::{SparseColMat, Triplet};
use faer::Mat;
use serde::{Deserialize, Serialize};

use super::{discrete_div, edge_mean, EdgeField, FluxGraph};
use crate::error::{Error, Result};

/// Below this many vertices the kernel dimension is certified by a dense SVD.
pub const DENSE_LIMIT: usize = 2000;
/// Required second-smallest singular value of the operator.
pub const GAP_TOL: f64 = 1e-8;
const RESIDUAL_TOL: f64 = 1e-10;
const INVERSE_ITERATIONS: usize = 60;

/// Sparse matrix of `L v = div(grad v + vbar X)` as sorted `(row, col) -> value`.
pub fn helmholtz_operator(g: &FluxGraph, x: &EdgeField) -> Result<BTreeMap<(usize, usize), f64>> {
    x.check(g)?;
    let mut entries = BTreeMap::new();
    let mut add = |r: usize, c: usize, v: f64| *entries.entry((r, c)).or_insert(0.0) += v;
    for (k, e) in g.edges().iter().enumerate() {
        for (a, b, forward) in [(e.u, e.v, true), (e.v, e.u, false)] {
            // w (v_b - v_a + (v_a + v_b) X_ab / 2) / m_a
            let s = e.weight / g.measures()[a];
            let xab = x.oriented(k, forward);
            add(a, b, s * (1.0 + 0.5 * xab));
            add(a, a, s * (-1.0 + 0.5 * xab));
        }
    }
    Ok(entries)
}

fn apply(entries: &BTreeMap<(usize, usize), f64>, v: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; v.len()];
    for (&(r, c), a) in entries {
        out[r] += a * v[c];
    }
    out
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KernelReport {
    /// Positive kernel vector with maximum 1.
    pub v: Vec<f64>,
    /// Number of singular values of `L` at most [`GAP_TOL`] (dense path), or 1
    /// when the bordered system certifies a simple kernel.
    pub kernel_dimension: usize,
    /// Second-smallest singular value of `L` (dense path) or smallest singular
    /// value of the bordered matrix (sparse path).
    pub singular_gap: f64,
    pub dense_certificate: bool,
    /// `max |L v|` with `max v = 1`.
    pub residual: f64,
}

/// Positive generator of `ker L`.
///
/// Solves the bordered system `[L 1; 1^T 0] [v; s] = [0; 1]` by sparse LU.
/// It is nonsingular exactly when `ker L` is one-dimensional, because the
/// range of `L` is the `m`-orthogonal complement of the constants.
pub fn modified_helmholtz_kernel(g: &FluxGraph, x: &EdgeField) -> Result<KernelReport> {
    let n = g.vertex_count();
    let entries = helmholtz_operator(g, x)?;
    if n == 1 {
        return Ok(KernelReport {
            v: vec![1.0],
            kernel_dimension: 1,
            singular_gap: f64::INFINITY,
            dense_certificate: true,
            residual: 0.0,
        });
    }

    let (singular_gap, kernel_dimension, dense_certificate) = if n < DENSE_LIMIT {
        let mut dense = Mat::<f64>::zeros(n, n);
        for (&(r, c), a) in &entries {
            dense[(r, c)] = *a;
        }
        let sv = dense
            .singular_values()
            .map_err(|e| Error::Solver(format!("dense SVD failed: {e:?}")))?;
        (sv[n - 2], sv.iter().filter(|&&s| s <= GAP_TOL).count(), true)
    } else {
        (f64::NAN, 1, false)
    };
    if dense_certificate && singular_gap <= GAP_TOL {
        return Err(Error::KernelDimension(singular_gap));
    }

    let mut trips: Vec<Triplet<usize, usize, f64>> = entries.iter().map(|(&(r, c), &a)| Triplet::new(r, c, a)).collect();
    for k in 0..n {
        trips.push(Triplet::new(k, n, 1.0));
        trips.push(Triplet::new(n, k, 1.0));
    }
    let bordered = SparseColMat::<usize, f64>::try_new_from_triplets(n + 1, n + 1, &trips)
        .map_err(|e| Error::Solver(format!("{e:?}")))?;
    let lu = bordered.sp_lu().map_err(|e| Error::Solver(format!("sparse LU failed: {e:?}")))?;

    let mut sol = Mat::<f64>::zeros(n + 1, 1);
    sol[(n, 0)] = 1.0;
    lu.solve_in_place(sol.as_mut());
    // one step of iterative refinement
    let mut full: Vec<f64> = (0..=n).map(|k| sol[(k, 0)]).collect();
    let mut r = Mat::<f64>::zeros(n + 1, 1);
    let lv = apply(&entries, &full[..n]);
    for k in 0..n {
        r[(k, 0)] = -(lv[k] + full[n]);
    }
    r[(n, 0)] = 1.0 - full[..n].iter().sum::<f64>();
    lu.solve_in_place(r.as_mut());
    for (k, f) in full.iter_mut().enumerate() {
        *f += r[(k, 0)];
    }
    if full.iter().any(|v| !v.is_finite()) {
        return Err(Error::KernelDimension(0.0));
    }

    let singular_gap = if dense_certificate {
        singular_gap
    } else {
        let gap = bordered_min_singular_value(&lu, n + 1);
        if gap <= GAP_TOL {
            return Err(Error::KernelDimension(gap));
        }
        gap
    };

    let mut v = full[..n].to_vec();
    let pivot = v.iter().copied().fold(0.0f64, |a, b| if b.abs() > a.abs() { b } else { a });
    v.iter_mut().for_each(|x| *x /= pivot);
    let min = v.iter().copied().fold(f64::INFINITY, f64::min);
    if min <= 0.0 {
        return Err(Error::Hypothesis {
            what: "kernel vector changes sign".into(),
            residual: min,
        });
    }
    let residual = apply(&entries, &v).iter().fold(0.0f64, |a, b| a.max(b.abs()));
    if residual > RESIDUAL_TOL {
        return Err(Error::NonConvergence {
            iterations: 2,
            residual,
        });
    }
    Ok(KernelReport {
        v,
        kernel_dimension,
        singular_gap,
        dense_certificate,
        residual,
    })
}

/// Inverse iteration on `B^T B` from the all-ones vector.
fn bordered_min_singular_value(lu: &faer::sparse::linalg::solvers::Lu<usize, f64>, n: usize) -> f64 {
    let mut x = Mat::<f64>::from_fn(n, 1, |_, _| 1.0 / (n as f64).sqrt());
    let mut growth = 0.0;
    for _ in 0..INVERSE_ITERATIONS {
        lu.solve_transpose_in_place(x.as_mut());
        lu.solve_in_place(x.as_mut());
        growth = x.norm_l2();
        if !(growth.is_finite() && growth > 0.0) {
            return 0.0;
        }
        x = x * Scale(1.0 / growth);
    }
    1.0 / growth.sqrt()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HelmholtzDecomposition {
    pub v: Vec<f64>,
    /// `X0 = grad v / vbar + X`, so `X = -grad v / vbar + X0`.
    pub x0: EdgeField,
    pub kernel_dimension: usize,
    pub singular_gap: f64,
    pub solver_residual: f64,
    /// `max |div(vbar X0)|`.
    pub divergence_residual: f64,
}

pub fn helmholtz_decompose(g: &FluxGraph, x: &EdgeField) -> Result<HelmholtzDecomposition> {
    let k = modified_helmholtz_kernel(g, x)?;
    let vbar = edge_mean(g, &k.v);
    let grad = super::discrete_grad(g, &k.v)?;
    let x0 = EdgeField {
        values: grad.values.iter().zip(&vbar).zip(&x.values).map(|((d, m), xv)| d / m + xv).collect(),
    };
    let flux = EdgeField {
        values: x0.values.iter().zip(&vbar).map(|(a, m)| a * m).collect(),
    };
    let divergence_residual = discrete_div(g, &flux)?.iter().fold(0.0f64, |a, b| a.max(b.abs()));
    Ok(HelmholtzDecomposition {
        v: k.v,
        x0,
        kernel_dimension: k.kernel_dimension,
        singular_gap: k.singular_gap,
        solver_residual: k.residual,
        divergence_residual,
    })
}
