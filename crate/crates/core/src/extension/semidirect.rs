use nalgebra::{DMatrix, DVector};

use super::block_metric;
use crate::error::{Error, Result};
use crate::lie::{catalog, LieAlgebra, StructureTensor};
use crate::linalg;
use crate::metric::MetricTensor;

const SPLIT_TOL: f64 = 1e-10;

/// Cartan decomposition `l = k + p` of a semisimple algebra, checked against
/// its Killing form. Subspaces are given by basis columns.
#[derive(Debug, Clone)]
pub struct CartanSplit {
    pub algebra: LieAlgebra,
    pub k: DMatrix<f64>,
    pub p: DMatrix<f64>,
    /// Coordinates in the basis `[k | p]`.
    coords: DMatrix<f64>,
}

impl CartanSplit {
    pub fn new(algebra: LieAlgebra, k: DMatrix<f64>, p: DMatrix<f64>) -> Result<Self> {
        let n = algebra.dim();
        if k.nrows() != n || p.nrows() != n || k.ncols() + p.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: k.ncols() + p.ncols(),
            });
        }
        let mut kp = DMatrix::zeros(n, n);
        kp.view_mut((0, 0), (n, k.ncols())).copy_from(&k);
        kp.view_mut((0, k.ncols()), (n, p.ncols())).copy_from(&p);
        let coords = kp.try_inverse().ok_or_else(|| Error::Hypothesis {
            what: "k and p do not span the algebra".into(),
            residual: 0.0,
        })?;
        let split = Self { algebra, k, p, coords };
        split.validate()?;
        Ok(split)
    }

    /// `sl(2, R)` in the basis `H, E, F` with `k = R(E - F)`, `p = span(H, E + F)`.
    pub fn sl2() -> Self {
        let k = DMatrix::from_column_slice(3, 1, &[0.0, 1.0, -1.0]);
        let p = DMatrix::from_column_slice(3, 2, &[1.0, 0.0, 0.0, 0.0, 1.0, 1.0]);
        Self::new(catalog::sl2(), k, p).expect("sl2 Cartan split is valid")
    }

    fn validate(&self) -> Result<()> {
        let kappa = self.algebra.killing_form();
        let kk = self.k.transpose() * &kappa * &self.k;
        let pp = self.p.transpose() * &kappa * &self.p;
        let kp = (self.k.transpose() * &kappa * &self.p).amax();
        let definite = |m: DMatrix<f64>| m.nrows() == 0 || m.symmetric_eigenvalues().min() > SPLIT_TOL;
        if !definite(-kk) || !definite(pp) || kp > SPLIT_TOL {
            return Err(Error::Hypothesis {
                what: "Killing form is not negative on k, positive on p, with k orthogonal to p".into(),
                residual: kp,
            });
        }
        // [k,k] in k, [k,p] in p, [p,p] in k
        let nk = self.k.ncols();
        let mut worst = 0.0f64;
        let cols = |m: &DMatrix<f64>| (0..m.ncols()).map(|c| m.column(c).into_owned()).collect::<Vec<_>>();
        let (ks, ps) = (cols(&self.k), cols(&self.p));
        for (xs, ys, into_k) in [(&ks, &ks, true), (&ks, &ps, false), (&ps, &ps, true)] {
            for x in xs {
                for y in ys {
                    let c = &self.coords * self.algebra.bracket(x, y);
                    let wrong = if into_k { c.rows(nk, c.len() - nk).amax() } else { c.rows(0, nk).amax() };
                    worst = worst.max(wrong);
                }
            }
        }
        if worst > SPLIT_TOL {
            return Err(Error::Hypothesis {
                what: "bracket relations of a Cartan decomposition".into(),
                residual: worst,
            });
        }
        Ok(())
    }

    /// Coordinates of the `p`-component of `y` in the `p` basis.
    pub fn p_coordinates(&self, y: &DVector<f64>) -> DVector<f64> {
        let nk = self.k.ncols();
        (&self.coords * y).rows(nk, self.p.ncols()).into_owned()
    }
}

/// The metric `g^E` on `p + s` together with the algebra `f = l + s`.
#[derive(Debug, Clone)]
pub struct SemidirectMetric {
    /// `f = l x_phi s`, basis of `l` first.
    pub algebra: LieAlgebra,
    /// `(kappa_f - kappa_l / 2)` on `p`, in the `p` basis.
    pub p_block: DMatrix<f64>,
    pub s_metric: MetricTensor,
    /// `g^E`, `p` block first.
    pub metric: MetricTensor,
    /// Distance of `phi(Y)^T` from `phi(l)`, largest over the basis.
    pub transpose_residual: f64,
    phi: Vec<DMatrix<f64>>,
}

/// Assembles `g^E|_s = g^S`, `p` orthogonal to `s`, and
/// `g^E|_p = (kappa_f - kappa_l / 2)|_p`.
///
/// `phi[a]` is the action of the `a`-th basis vector of `l` on `s`.
pub fn semidirect_metric(
    split: &CartanSplit,
    s: &LieAlgebra,
    gs: &MetricTensor,
    phi: &[DMatrix<f64>],
) -> Result<SemidirectMetric> {
    let l = &split.algebra;
    let (dl, ds) = (l.dim(), s.dim());
    if phi.len() != dl || gs.dim() != ds {
        return Err(Error::DimensionMismatch {
            expected: dl,
            found: phi.len(),
        });
    }
    if let Some(bad) = phi.iter().find(|m| m.nrows() != ds || m.ncols() != ds) {
        return Err(Error::DimensionMismatch {
            expected: ds,
            found: bad.nrows(),
        });
    }
    let algebra = semidirect_sum(l, s, phi, "f")?;

    // phi(l) must be closed under the g^S-transpose.
    let span = DMatrix::from_fn(ds * ds, dl, |r, a| phi[a][(r % ds, r / ds)]);
    let mut transpose_residual = 0.0f64;
    for m in phi {
        let t = gs.adjoint(m);
        let v = DVector::from_column_slice(t.as_slice());
        let fit = &span * linalg::lstsq(&span, &v);
        transpose_residual = transpose_residual.max((fit - v).amax());
    }
    if transpose_residual > SPLIT_TOL {
        return Err(Error::Hypothesis {
            what: "phi(l) is not closed under transpose".into(),
            residual: transpose_residual,
        });
    }

    let np = split.p.ncols();
    let mut pf = DMatrix::zeros(dl + ds, np);
    pf.view_mut((0, 0), (dl, np)).copy_from(&split.p);
    let p_block = linalg::symmetric_part(
        &(pf.transpose() * algebra.killing_form() * &pf - split.p.transpose() * l.killing_form() * &split.p * 0.5),
    );
    let metric = block_metric(&p_block, gs.matrix())?;
    Ok(SemidirectMetric {
        algebra,
        p_block,
        s_metric: gs.clone(),
        metric,
        transpose_residual,
        phi: phi.to_vec(),
    })
}

impl SemidirectMetric {
    /// The solvable group `AN x_phi S` acting simply transitively on `F/K`,
    /// with the left-invariant metric induced by `g^E`.
    ///
    /// `an` holds basis columns of a subalgebra of `l` complementary to `k`.
    pub fn solvable_model(&self, split: &CartanSplit, s: &LieAlgebra, an: &DMatrix<f64>) -> Result<(LieAlgebra, MetricTensor)> {
        let l = &split.algebra;
        let (dl, da) = (l.dim(), an.ncols());
        if an.nrows() != dl || da != split.p.ncols() {
            return Err(Error::DimensionMismatch {
                expected: split.p.ncols(),
                found: da,
            });
        }
        let cols: Vec<DVector<f64>> = (0..da).map(|c| an.column(c).into_owned()).collect();
        let mut mu = StructureTensor::zeros(da);
        let mut closure = 0.0f64;
        for a in 0..da {
            for b in 0..da {
                let y = l.bracket(&cols[a], &cols[b]);
                let c = linalg::lstsq(an, &y);
                closure = closure.max((an * &c - y).amax());
                for k in 0..da {
                    mu.set(a, b, k, c[k]);
                }
            }
        }
        if closure > SPLIT_TOL {
            return Err(Error::Hypothesis {
                what: "an is not a subalgebra".into(),
                residual: closure,
            });
        }
        let an_alg = LieAlgebra::from_tensor("an", &mu)?;
        let proj = DMatrix::from_columns(&cols.iter().map(|y| split.p_coordinates(y)).collect::<Vec<_>>());
        if proj.clone().try_inverse().is_none() {
            return Err(Error::Hypothesis {
                what: "an meets k".into(),
                residual: 0.0,
            });
        }
        let phi_an: Vec<DMatrix<f64>> = cols
            .iter()
            .map(|y| {
                y.iter()
                    .zip(&self.phi)
                    .fold(DMatrix::zeros(s.dim(), s.dim()), |acc, (c, m)| acc + m * *c)
            })
            .collect();
        let model = semidirect_sum(&an_alg, s, &phi_an, "an-s")?;
        let metric = block_metric(&(proj.transpose() * &self.p_block * &proj), self.s_metric.matrix())?;
        Ok((model, metric))
    }
}

/// `a + s` with `[a_i, s_j] = phi_i s_j`; rejects data violating Jacobi.
fn semidirect_sum(a: &LieAlgebra, s: &LieAlgebra, phi: &[DMatrix<f64>], name: &str) -> Result<LieAlgebra> {
    let (da, ds) = (a.dim(), s.dim());
    let mut mu = StructureTensor::zeros(da + ds);
    for e in a.entries() {
        mu.set_antisymmetric(e.i, e.j, e.k, e.c);
    }
    for e in s.entries() {
        mu.set_antisymmetric(da + e.i, da + e.j, da + e.k, e.c);
    }
    for (i, m) in phi.iter().enumerate() {
        for j in 0..ds {
            for k in 0..ds {
                if m[(k, j)] != 0.0 {
                    mu.set_antisymmetric(i, da + j, da + k, m[(k, j)]);
                }
            }
        }
    }
    let f = LieAlgebra::from_tensor(name, &mu)?;
    let jacobi = f.validate_jacobi();
    if !jacobi.passed {
        return Err(Error::Hypothesis {
            what: "phi is not a representation by derivations".into(),
            residual: jacobi.max_residual,
        });
    }
    Ok(f)
}
