use nalgebra::{DMatrix, DVector};

use crate::metric::MetricTensor;

/// An element of the bracket space: a bilinear map `mu(e_i, e_j) = sum_k c^k_ij e_k`,
/// stored densely over all ordered pairs.
///
/// The tensor is not required to be antisymmetric, but every operation here
/// preserves antisymmetry when the input has it.
#[derive(Debug, Clone, PartialEq)]
pub struct StructureTensor {
    dim: usize,
    data: Vec<f64>,
}

impl StructureTensor {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![0.0; dim * dim * dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    fn idx(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.dim + j) * self.dim + k
    }

    /// Coefficient `c^k_ij`.
    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.data[self.idx(i, j, k)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, k: usize, c: f64) {
        let id = self.idx(i, j, k);
        self.data[id] = c;
    }

    /// Sets `c^k_ij = c` and `c^k_ji = -c`.
    pub fn set_antisymmetric(&mut self, i: usize, j: usize, k: usize, c: f64) {
        self.set(i, j, k, c);
        self.set(j, i, k, -c);
    }

    /// Evaluates `mu(x, y)`.
    pub fn apply(&self, x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
        let n = self.dim;
        let mut out = DVector::zeros(n);
        for i in 0..n {
            if x[i] == 0.0 {
                continue;
            }
            for j in 0..n {
                let w = x[i] * y[j];
                if w == 0.0 {
                    continue;
                }
                for k in 0..n {
                    out[k] += w * self.get(i, j, k);
                }
            }
        }
        out
    }

    /// Matrix of `y -> mu(e_i, y)`.
    pub fn left_mul(&self, i: usize) -> DMatrix<f64> {
        DMatrix::from_fn(self.dim, self.dim, |k, j| self.get(i, j, k))
    }

    /// `(q . mu)(x, y) = q mu(q^{-1} x, q^{-1} y)`.
    pub fn act(&self, q: &DMatrix<f64>) -> Self {
        let n = self.dim;
        let qinv = q
            .clone()
            .try_inverse()
            .expect("change of basis must be invertible");
        // t1[a][j][k] = sum_i Qinv[i][a] c^k_ij
        let mut t1 = vec![0.0; n * n * n];
        for a in 0..n {
            for i in 0..n {
                let w = qinv[(i, a)];
                if w == 0.0 {
                    continue;
                }
                for j in 0..n {
                    for k in 0..n {
                        t1[(a * n + j) * n + k] += w * self.get(i, j, k);
                    }
                }
            }
        }
        let mut t2 = vec![0.0; n * n * n];
        for a in 0..n {
            for b in 0..n {
                for j in 0..n {
                    let w = qinv[(j, b)];
                    if w == 0.0 {
                        continue;
                    }
                    for k in 0..n {
                        t2[(a * n + b) * n + k] += w * t1[(a * n + j) * n + k];
                    }
                }
            }
        }
        let mut out = Self::zeros(n);
        for a in 0..n {
            for b in 0..n {
                for kp in 0..n {
                    let mut s = 0.0;
                    for k in 0..n {
                        s += q[(kp, k)] * t2[(a * n + b) * n + k];
                    }
                    out.set(a, b, kp, s);
                }
            }
        }
        out
    }

    /// Infinitesimal action `E mu(.,.) - mu(E.,.) - mu(.,E.)`.
    pub fn tau(&self, e: &DMatrix<f64>) -> Self {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for a in 0..n {
            for b in 0..n {
                for k in 0..n {
                    let mut s = 0.0;
                    for r in 0..n {
                        s += e[(k, r)] * self.get(a, b, r);
                        s -= e[(r, a)] * self.get(r, b, k);
                        s -= e[(r, b)] * self.get(a, r, k);
                    }
                    out.set(a, b, k, s);
                }
            }
        }
        out
    }

    pub fn scaled(&self, t: f64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|x| x * t).collect(),
        }
    }

    /// Inner product induced by `h`, summed over all ordered pairs of an
    /// `h`-orthonormal basis.
    pub fn inner(&self, other: &Self, h: &MetricTensor) -> f64 {
        assert_eq!(self.dim, other.dim);
        // Coordinates with respect to the orthonormal frame P are P^{-1} . mu.
        let frame_inv = h.frame_inverse();
        let a = self.act(&frame_inv);
        let b = if std::ptr::eq(self, other) {
            a.clone()
        } else {
            other.act(&frame_inv)
        };
        a.data.iter().zip(&b.data).map(|(x, y)| x * y).sum()
    }

    pub fn norm_squared(&self, h: &MetricTensor) -> f64 {
        self.inner(self, h)
    }

    /// Largest absolute coefficient.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
    }
}

impl std::ops::Sub for &StructureTensor {
    type Output = StructureTensor;
    fn sub(self, rhs: &StructureTensor) -> StructureTensor {
        StructureTensor {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl std::ops::Add for &StructureTensor {
    type Output = StructureTensor;
    fn add(self, rhs: &StructureTensor) -> StructureTensor {
        StructureTensor {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}
