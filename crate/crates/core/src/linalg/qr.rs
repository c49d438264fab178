use alloc::format;

use super::householder;
use crate::error::{Error, Result};
use crate::flops;
use crate::{ComplexMatrix, C64};

/// Thin QR factors `A = Q R`.
#[derive(Clone, Debug, PartialEq)]
pub struct QrFactors {
    /// `n x m`, orthonormal columns.
    pub q: ComplexMatrix,
    /// `m x m` upper triangular with a real non-negative diagonal.
    pub r: ComplexMatrix,
}

/// Thin Householder QR of a tall `n x m` matrix.
///
/// The diagonal of `R` is rotated onto the non-negative real axis (the
/// matching phases move into `Q`), which makes the factors unique for full
/// column rank inputs.
pub fn qr_decompose(a: &ComplexMatrix) -> Result<QrFactors> {
    let (n, m) = a.shape();
    if n < m {
        return Err(Error::Shape(format!(
            "thin QR needs rows >= cols, got {n}x{m}"
        )));
    }
    a.ensure_finite("matrix")?;
    flops::charge(|c| c.householder_qr(n, m) + c.apply_reflectors(n, m, m));

    let (refl, mut r) = householder::factor(a);
    let mut q = refl.thin_q(m);
    for j in 0..m {
        let d = r[(j, j)];
        let mag = d.norm();
        if mag == 0.0 {
            continue;
        }
        let phase = d / mag;
        for k in j..m {
            r[(j, k)] = r[(j, k)] * phase.conj();
        }
        r[(j, j)] = C64::new(mag, 0.0);
        for i in 0..n {
            q[(i, j)] = q[(i, j)] * phase;
        }
    }
    Ok(QrFactors { q, r })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn identity() {
        let f = qr_decompose(&ComplexMatrix::identity(2)).unwrap();
        assert_eq!(f.q, ComplexMatrix::identity(2));
        assert_eq!(f.r, ComplexMatrix::identity(2));
    }

    #[test]
    fn single_imaginary_column() {
        let a = ComplexMatrix::from_rows(&[vec![C64::new(0.0, 0.0)], vec![C64::new(0.0, 3.0)]])
            .unwrap();
        let f = qr_decompose(&a).unwrap();
        assert!((f.r[(0, 0)] - C64::new(3.0, 0.0)).norm() < 1e-15);
        assert!(f.q[(0, 0)].norm() < 1e-15);
        assert!((f.q[(1, 0)] - C64::new(0.0, 1.0)).norm() < 1e-15);
    }

    #[test]
    fn wide_is_rejected() {
        assert!(matches!(
            qr_decompose(&ComplexMatrix::zeros(2, 3)),
            Err(Error::Shape(_))
        ));
    }

    #[test]
    fn reconstructs() {
        let a = ComplexMatrix::from_fn(4, 2, |i, j| {
            C64::new(
                (i as f64 * 1.1 + j as f64).sin(),
                (i as f64 - 2.0 * j as f64).cos(),
            )
        });
        let f = qr_decompose(&a).unwrap();
        let qr = f.q.matmul(&f.r).unwrap();
        assert!(qr.sub(&a).unwrap().norm_fro() <= 1e-10 * a.norm_fro());
        assert!(f.q.adjoint().row_orthonormality_error() <= 1e-10);
        assert_eq!(f.r[(1, 0)], C64::new(0.0, 0.0));
        for j in 0..2 {
            assert!(f.r[(j, j)].im == 0.0 && f.r[(j, j)].re >= 0.0);
        }
    }
}
