use nalgebra::DMatrix;

use super::LieAlgebra;
use crate::error::{Error, Result};
use crate::linalg;

/// Residual threshold for [`is_derivation`].
pub const DERIVATION_TOL: f64 = 1e-10;

/// A basis of `Der(L)`, each element a `dim x dim` matrix.
#[derive(Debug, Clone)]
pub struct DerivationSpace {
    pub basis: Vec<DMatrix<f64>>,
}

impl DerivationSpace {
    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    /// Orthogonal projection of `a` onto `span(Id) + Der` with respect to the
    /// trace inner product in the frame given by `frame`/`frame_inv`.
    ///
    /// Returns `(lambda, D)` with `D` in `Der`.
    pub fn project_with_identity(
        &self,
        a: &DMatrix<f64>,
        frame: &DMatrix<f64>,
        frame_inv: &DMatrix<f64>,
    ) -> (f64, DMatrix<f64>) {
        let n = a.nrows();
        let to_frame = |m: &DMatrix<f64>| frame_inv * m * frame;
        let mut columns: Vec<DMatrix<f64>> = vec![DMatrix::identity(n, n)];
        columns.extend(self.basis.iter().map(to_frame));
        let m = DMatrix::from_fn(n * n, columns.len(), |r, c| columns[c][(r % n, r / n)]);
        let target = to_frame(a);
        let b = nalgebra::DVector::from_iterator(n * n, target.iter().copied());
        let coef = linalg::lstsq(&m, &b);
        let mut d = DMatrix::zeros(n, n);
        for (k, e) in self.basis.iter().enumerate() {
            d += e * coef[k + 1];
        }
        (coef[0], d)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivationCheck {
    pub is_derivation: bool,
    /// Largest coefficient of `E[x,y] - [Ex,y] - [x,Ey]` over basis pairs.
    pub residual: f64,
}

/// Linear map `E -> tau(E) mu` as a matrix acting on column-major `vec(E)`.
fn derivation_system(l: &LieAlgebra) -> DMatrix<f64> {
    let n = l.dim();
    let mu = l.structure();
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|a| ((a + 1)..n).map(move |b| (a, b)))
        .collect();
    let mut sys = DMatrix::zeros(pairs.len() * n, n * n);
    for (p, &(a, b)) in pairs.iter().enumerate() {
        for k in 0..n {
            let row = p * n + k;
            for r in 0..n {
                // E_kr c^r_ab
                sys[(row, k + r * n)] += mu.get(a, b, r);
                // -E_ra c^k_rb
                sys[(row, r + a * n)] -= mu.get(r, b, k);
                // -E_rb c^k_ar
                sys[(row, r + b * n)] -= mu.get(a, r, k);
            }
        }
    }
    sys
}

pub fn derivation_space(l: &LieAlgebra) -> DerivationSpace {
    let n = l.dim();
    let sys = derivation_system(l);
    let null = if sys.nrows() == 0 {
        DMatrix::identity(n * n, n * n)
    } else {
        linalg::nullspace(&sys, 1e-10)
    };
    let basis = (0..null.ncols())
        .map(|c| {
            let mut m = DMatrix::from_column_slice(n, n, null.column(c).as_slice());
            // Clean tiny entries so exact derivations stay exact.
            m.iter_mut().for_each(|x| {
                if x.abs() < 1e-14 {
                    *x = 0.0
                }
            });
            m
        })
        .collect();
    DerivationSpace { basis }
}

pub fn is_derivation(l: &LieAlgebra, e: &DMatrix<f64>) -> Result<DerivationCheck> {
    let n = l.dim();
    if e.nrows() != n || e.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: if e.nrows() != n { e.nrows() } else { e.ncols() },
        });
    }
    let residual = l.structure().tau(e).max_abs();
    Ok(DerivationCheck {
        is_derivation: residual <= DERIVATION_TOL,
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::catalog;
    use nalgebra::DVector;

    #[test]
    fn dimensions_of_small_algebras() {
        assert_eq!(derivation_space(&catalog::h3()).dimension(), 6);
        assert_eq!(derivation_space(&LieAlgebra::abelian(3)).dimension(), 9);
        assert_eq!(derivation_space(&LieAlgebra::abelian(1)).dimension(), 1);
    }

    #[test]
    fn identity_is_derivation_only_when_abelian() {
        let id = DMatrix::identity(3, 3);
        assert!(is_derivation(&LieAlgebra::abelian(3), &id).unwrap().is_derivation);
        let r = is_derivation(&catalog::h3(), &id).unwrap();
        assert!(!r.is_derivation);
        assert_eq!(r.residual, 1.0);
        let d = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 1.0, 2.0]));
        assert!(is_derivation(&catalog::h3(), &d).unwrap().is_derivation);
        assert!(is_derivation(&catalog::h3(), &DMatrix::identity(2, 2)).is_err());
    }

    #[test]
    fn basis_elements_are_derivations() {
        for l in [catalog::h3(), catalog::n4(), catalog::g31iii()] {
            for e in derivation_space(&l).basis {
                assert!(is_derivation(&l, &e).unwrap().is_derivation);
            }
        }
    }
}
