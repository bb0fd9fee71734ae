//! Positivity test for `U x = 1` with `U` the Gram matrix of the weights of a
//! nice basis. A positive solution exists exactly when the algebra admits a
//! nilsoliton.

use minilp::{ComparisonOp, OptimizationDirection, Problem};
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::weight_vectors;
use crate::lie::NiceStructure;
use crate::linalg;

/// Margin below which the optimum counts as zero.
pub const POSITIVITY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NilradicalVerdict {
    pub gram: DMatrix<f64>,
    /// A solution of `U x = 1` maximizing its smallest coordinate, if solvable.
    pub solution: Option<Vec<f64>>,
    /// Largest achievable smallest coordinate (capped at 1).
    pub margin: f64,
    pub residual: f64,
    /// A componentwise positive solution exists (margin above the tolerance).
    pub verdict: bool,
    /// The best margin is zero within tolerance: nonnegative solutions exist
    /// but none is positive.
    pub degenerate: bool,
}

pub fn einstein_nilradical_criterion(nice: &NiceStructure) -> NilradicalVerdict {
    let alphas = weight_vectors(nice);
    let m = alphas.len();
    if m == 0 {
        return NilradicalVerdict {
            gram: DMatrix::zeros(0, 0),
            solution: Some(Vec::new()),
            margin: 1.0,
            residual: 0.0,
            verdict: true,
            degenerate: false,
        };
    }
    let gram = DMatrix::from_fn(m, m, |a, b| alphas[a].dot(&alphas[b]));
    let ones = DVector::from_element(m, 1.0);
    let particular = linalg::lstsq(&gram, &ones);
    let residual = (&gram * &particular - &ones).amax();
    if residual > POSITIVITY_TOL {
        return NilradicalVerdict {
            gram,
            solution: None,
            margin: f64::NEG_INFINITY,
            residual,
            verdict: false,
            degenerate: false,
        };
    }
    let null = linalg::nullspace(&gram, 1e-10);
    let (x, margin) = maximize_min_coordinate(&particular, &null);
    let residual = (&gram * &x - &ones).amax();
    NilradicalVerdict {
        gram,
        solution: Some(x.iter().copied().collect()),
        margin,
        residual,
        verdict: margin > POSITIVITY_TOL,
        degenerate: margin.abs() <= POSITIVITY_TOL,
    }
}

/// Maximizes `t` subject to `p + N z >= t` componentwise and `t <= 1`.
fn maximize_min_coordinate(p: &DVector<f64>, null: &DMatrix<f64>) -> (DVector<f64>, f64) {
    let k = null.ncols();
    if k == 0 {
        return (p.clone(), p.min().min(1.0));
    }
    let mut problem = Problem::new(OptimizationDirection::Maximize);
    let t = problem.add_var(1.0, (f64::NEG_INFINITY, 1.0));
    let z: Vec<_> = (0..k)
        .map(|_| problem.add_var(0.0, (f64::NEG_INFINITY, f64::INFINITY)))
        .collect();
    for row in 0..p.len() {
        // p_r + sum_c N_rc z_c - t >= 0
        let mut expr: Vec<(minilp::Variable, f64)> = vec![(t, -1.0)];
        expr.extend(z.iter().enumerate().map(|(c, &v)| (v, null[(row, c)])));
        problem.add_constraint(expr.as_slice(), ComparisonOp::Ge, -p[row]);
    }
    match problem.solve() {
        Ok(sol) => {
            let zv = DVector::from_iterator(k, z.iter().map(|&v| sol[v]));
            let x = p + null * zv;
            let margin = x.min().min(1.0);
            (x, margin)
        }
        // The feasible set is never empty (t can go to -inf); an error means
        // the solver failed, so fall back to the particular solution.
        Err(_) => (p.clone(), p.min().min(1.0)),
    }
}
