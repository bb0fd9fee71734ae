//! Minimum-norm point of a convex hull (Wolfe's algorithm).

use nalgebra::{DMatrix, DVector};

use crate::linalg;

#[derive(Debug, Clone)]
pub struct MinNormPoint {
    pub point: DVector<f64>,
    /// Convex weights, one per input point.
    pub weights: Vec<f64>,
    /// `max(0, |m|^2 - min_l <p_l, m>)`; zero at the optimum.
    pub kkt_residual: f64,
}

const KKT_TOL: f64 = 1e-12;

/// Minimizes `|sum x_l p_l|^2` over the simplex.
///
/// # Panics
/// If `points` is empty or the dimensions differ.
pub fn min_norm_point(points: &[DVector<f64>]) -> MinNormPoint {
    assert!(!points.is_empty(), "min_norm_point needs at least one point");
    let n = points[0].len();
    assert!(points.iter().all(|p| p.len() == n));
    let m = points.len();
    let scale = points.iter().map(|p| p.norm_squared()).fold(1.0, f64::max);

    let start = (0..m)
        .min_by(|&a, &b| points[a].norm_squared().total_cmp(&points[b].norm_squared()))
        .expect("nonempty");
    let mut active = vec![start];
    let mut x = vec![1.0];
    let combine = |active: &[usize], w: &[f64]| -> DVector<f64> {
        active
            .iter()
            .zip(w)
            .fold(DVector::zeros(n), |acc, (&i, &wi)| acc + &points[i] * wi)
    };

    for _ in 0..(50 * (m + n) + 100) {
        let cur = combine(&active, &x);
        let norm2 = cur.norm_squared();
        let (j, best) = (0..m)
            .map(|l| (l, points[l].dot(&cur)))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("nonempty");
        if best >= norm2 - KKT_TOL * scale || active.contains(&j) {
            break;
        }
        active.push(j);
        x.push(0.0);
        // Minor cycles: move toward the affine minimizer of the active set.
        loop {
            let w = affine_minimizer(points, &active);
            if w.iter().all(|&wi| wi > 1e-15) {
                x = w;
                break;
            }
            let mut theta = 1.0_f64;
            for (xi, wi) in x.iter().zip(&w) {
                if *wi <= 1e-15 && xi - wi > 0.0 {
                    theta = theta.min(xi / (xi - wi));
                }
            }
            for (xi, wi) in x.iter_mut().zip(&w) {
                *xi += theta * (wi - *xi);
            }
            let keep: Vec<bool> = x.iter().map(|&xi| xi > 1e-15).collect();
            if keep.iter().all(|&k| k) {
                // Numerical stall: drop the smallest weight.
                let drop = (0..x.len())
                    .min_by(|&a, &b| x[a].total_cmp(&x[b]))
                    .expect("nonempty");
                active.remove(drop);
                x.remove(drop);
            } else {
                let mut k = 0;
                active.retain(|_| {
                    k += 1;
                    keep[k - 1]
                });
                x.retain(|&xi| xi > 1e-15);
            }
            let total: f64 = x.iter().sum();
            x.iter_mut().for_each(|xi| *xi /= total);
            if active.len() == 1 {
                x = vec![1.0];
                break;
            }
        }
    }

    let point = combine(&active, &x);
    let mut weights = vec![0.0; m];
    for (&i, &wi) in active.iter().zip(&x) {
        weights[i] += wi;
    }
    let norm2 = point.norm_squared();
    let min_dot = points.iter().map(|p| p.dot(&point)).fold(f64::INFINITY, f64::min);
    MinNormPoint {
        point,
        weights,
        kkt_residual: (norm2 - min_dot).max(0.0),
    }
}

/// Minimizer of `|sum w_i p_i|` subject to `sum w_i = 1` (no sign constraint).
fn affine_minimizer(points: &[DVector<f64>], active: &[usize]) -> Vec<f64> {
    let k = active.len();
    let mut sys = DMatrix::zeros(k + 1, k + 1);
    for a in 0..k {
        for b in 0..k {
            sys[(a, b)] = points[active[a]].dot(&points[active[b]]);
        }
        sys[(a, k)] = 1.0;
        sys[(k, a)] = 1.0;
    }
    let mut rhs = DVector::zeros(k + 1);
    rhs[k] = 1.0;
    let sol = linalg::lstsq(&sys, &rhs);
    sol.iter().take(k).copied().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: &[f64]) -> DVector<f64> {
        DVector::from_row_slice(x)
    }

    #[test]
    fn single_point() {
        let r = min_norm_point(&[v(&[1.0, -2.0])]);
        assert_eq!(r.point, v(&[1.0, -2.0]));
        assert_eq!(r.weights, vec![1.0]);
    }

    #[test]
    fn opposite_points() {
        let r = min_norm_point(&[v(&[1.0, 2.0]), v(&[-1.0, -2.0])]);
        assert!(r.point.norm() < 1e-15);
        assert!((r.weights[0] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn filiform_weights() {
        let r = min_norm_point(&[v(&[-1.0, -1.0, 1.0, 0.0]), v(&[-1.0, 0.0, -1.0, 1.0])]);
        assert!((r.point - v(&[-1.0, -0.5, 0.0, 0.5])).amax() < 1e-14);
        assert!(r.kkt_residual <= 1e-12);
    }

    #[test]
    fn vertex_of_triangle_away_from_origin() {
        // hull of (1,0),(2,1),(2,-1): nearest point is (1,0)
        let r = min_norm_point(&[v(&[2.0, 1.0]), v(&[1.0, 0.0]), v(&[2.0, -1.0])]);
        assert!((r.point - v(&[1.0, 0.0])).amax() < 1e-14);
        assert!((r.weights[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn edge_interior() {
        // segment (1,-1)-(1,1) with an extra far point
        let r = min_norm_point(&[v(&[1.0, -1.0]), v(&[3.0, 0.0]), v(&[1.0, 1.0])]);
        assert!((r.point - v(&[1.0, 0.0])).amax() < 1e-14);
        assert!(r.kkt_residual <= 1e-12);
    }
}
