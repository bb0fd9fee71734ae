use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::lie::{LieAlgebra, StructureTensor};
use crate::linalg;
use crate::metric::MetricTensor;

/// Levi-Civita connection of a left-invariant metric on the basis `e_i`.
///
/// `gamma[i]` is the matrix of `Y -> nabla_{e_i} Y`; its column `j` holds the
/// coordinates of `nabla_{e_i} e_j`.
#[derive(Debug, Clone)]
pub struct ConnectionTable {
    pub gamma: Vec<DMatrix<f64>>,
}

impl ConnectionTable {
    pub fn nabla(&self, i: usize, j: usize) -> DVector<f64> {
        self.gamma[i].column(j).into_owned()
    }

    /// `nabla_X Y` for arbitrary vectors.
    pub fn covariant(&self, x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
        let mut out = DVector::zeros(y.len());
        for (i, g) in self.gamma.iter().enumerate() {
            if x[i] != 0.0 {
                out += g * y * x[i];
            }
        }
        out
    }

    /// Largest deviation from `nabla_{e_i} e_j - nabla_{e_j} e_i = [e_i, e_j]`.
    pub fn torsion_residual(&self, l: &LieAlgebra) -> f64 {
        let n = l.dim();
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in 0..n {
                let t = self.nabla(i, j) - self.nabla(j, i) - l.bracket(&l.basis_vector(i), &l.basis_vector(j));
                worst = worst.max(t.amax());
            }
        }
        worst
    }

    /// Largest deviation from `<nabla_{e_i} e_j, e_k> + <e_j, nabla_{e_i} e_k> = 0`.
    pub fn metric_residual(&self, h: &MetricTensor) -> f64 {
        let hm = h.matrix();
        self.gamma
            .iter()
            .map(|g| {
                let a = hm * g;
                (&a + a.transpose()).amax()
            })
            .fold(0.0, f64::max)
    }
}

/// Koszul formula for left-invariant fields:
/// `2<nabla_X Y, Z> = <[X,Y],Z> - <[Y,Z],X> + <[Z,X],Y>`.
pub fn koszul_connection(l: &LieAlgebra, h: &MetricTensor) -> ConnectionTable {
    koszul_from_tensor(l.structure(), h)
}

pub(crate) fn koszul_from_tensor(mu: &StructureTensor, h: &MetricTensor) -> ConnectionTable {
    let n = mu.dim();
    let hm = h.matrix();
    let hinv = h.inverse();
    // b[i][j][k] = <[e_i, e_j], e_k>
    let mut b = vec![0.0; n * n * n];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let mut s = 0.0;
                for r in 0..n {
                    s += mu.get(i, j, r) * hm[(r, k)];
                }
                b[(i * n + j) * n + k] = s;
            }
        }
    }
    let bb = |i: usize, j: usize, k: usize| b[(i * n + j) * n + k];
    let gamma = (0..n)
        .map(|i| {
            let lower = DMatrix::from_fn(n, n, |k, j| 0.5 * (bb(i, j, k) - bb(j, k, i) + bb(k, i, j)));
            &hinv * lower
        })
        .collect();
    ConnectionTable { gamma }
}

/// Ricci data of a left-invariant metric.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CurvatureReport {
    /// Ricci endomorphism, `h(Ric x, y) = ric(x, y)`.
    pub ricci: DMatrix<f64>,
    /// Ricci form `ric_ij`.
    pub ricci_form: DMatrix<f64>,
    pub scal: f64,
    /// Mean curvature vector `H` with `<H, Y> = tr ad Y`.
    pub mean_curvature: DVector<f64>,
    /// Deviation of `Ric` from being `h`-self-adjoint before symmetrization.
    pub self_adjoint_residual: f64,
}

/// Ricci curvature assembled from `R(X,Y) = [nabla_X, nabla_Y] - nabla_{[X,Y]}`.
pub fn ricci_endomorphism(l: &LieAlgebra, h: &MetricTensor) -> CurvatureReport {
    ricci_from_tensor(l.structure(), h)
}

pub(crate) fn ricci_from_tensor(mu: &StructureTensor, h: &MetricTensor) -> CurvatureReport {
    let n = mu.dim();
    let conn = koszul_from_tensor(mu, h);
    let g = &conn.gamma;
    let mut form = DMatrix::zeros(n, n);
    for a in 0..n {
        for b in 0..n {
            // R(e_a, e_b) as a matrix
            let mut r = &g[a] * &g[b] - &g[b] * &g[a];
            for (s, gs) in g.iter().enumerate() {
                let c = mu.get(a, b, s);
                if c != 0.0 {
                    r -= gs * c;
                }
            }
            // ric(e_b, e_c) = sum_a [R(e_a, e_b) e_c]^a
            for c in 0..n {
                form[(b, c)] += r[(a, c)];
            }
        }
    }
    let asym = (&form - form.transpose()).amax();
    let form = linalg::symmetric_part(&form);
    let hinv = h.inverse();
    let ricci = &hinv * &form;
    let traces = DVector::from_fn(n, |i, _| mu.left_mul(i).trace());
    CurvatureReport {
        scal: ricci.trace(),
        mean_curvature: &hinv * traces,
        ricci,
        ricci_form: form,
        self_adjoint_residual: asym,
    }
}

/// Ricci form from Killing-field formulas at the identity.
///
/// Right-invariant fields are Killing and their bracket at the identity is
/// `B(X, Y) = -[X, Y]`. Covariant derivatives of Killing fields at a point
/// follow from `2<nabla_X Y, Z> = <B(X,Y),Z> + <B(X,Z),Y> + <X,B(Y,Z)>`, and
/// for an orthonormal frame `E_i`
///
/// `ric(X,X) = 2 sum <nabla_{E_i} X, B(X,E_i)> + |nabla X|^2
///            - tr (ad X)^2 - sum <nabla_{E_i} E_i, nabla_X X>`.
pub fn ricci_via_killing(l: &LieAlgebra, h: &MetricTensor) -> DMatrix<f64> {
    let n = l.dim();
    let hm = h.matrix();
    let hinv = h.inverse();
    let kb = |x: &DVector<f64>, y: &DVector<f64>| -l.bracket(x, y);
    let ip = |x: &DVector<f64>, y: &DVector<f64>| (x.transpose() * hm * y)[(0, 0)];
    let nabla = |x: &DVector<f64>, y: &DVector<f64>| -> DVector<f64> {
        // coordinates of nabla_X Y from the functionals against e_k
        let lower = DVector::from_fn(n, |k, _| {
            let z = l.basis_vector(k);
            0.5 * (ip(&kb(x, y), &z) + ip(&kb(x, &z), y) + ip(x, &kb(y, &z)))
        });
        &hinv * lower
    };
    let frame = h.frame();
    let es: Vec<DVector<f64>> = (0..n).map(|i| frame.column(i).into_owned()).collect();
    let mean: DVector<f64> = es
        .iter()
        .map(|e| nabla(e, e))
        .fold(DVector::zeros(n), |acc, v| acc + v);
    let quad = |x: &DVector<f64>| -> f64 {
        let mut s = 0.0;
        for e in &es {
            let ne = nabla(e, x);
            s += 2.0 * ip(&ne, &kb(x, e)) + ip(&ne, &ne);
        }
        let ad = l.ad(x);
        s -= (&ad * &ad).trace();
        s -= ip(&mean, &nabla(x, x));
        s
    };
    let basis: Vec<DVector<f64>> = (0..n).map(|i| l.basis_vector(i)).collect();
    let diag: Vec<f64> = basis.iter().map(quad).collect();
    DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            diag[i]
        } else {
            0.5 * (quad(&(&basis[i] + &basis[j])) - diag[i] - diag[j])
        }
    })
}
