use alloc::format;

#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::flops;
use crate::{ComplexMatrix, C64};

/// Lower-triangular `L` with `A = L Lᴴ` for Hermitian positive definite `A`.
pub fn cholesky(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = a.rows();
    if a.cols() != n {
        return Err(Error::Shape(format!(
            "cholesky of a {}x{} matrix",
            n,
            a.cols()
        )));
    }
    a.ensure_finite("matrix")?;
    flops::charge(|c| c.cholesky(n));
    let mut l = ComplexMatrix::zeros(n, n);
    for j in 0..n {
        let mut d = a[(j, j)].re;
        for k in 0..j {
            d -= l[(j, k)].norm_sqr();
        }
        if !(d > 0.0) {
            return Err(Error::Singular(format!(
                "matrix is not positive definite (pivot {j} is {d:.3e})"
            )));
        }
        let d = d.sqrt();
        l[(j, j)] = C64::new(d, 0.0);
        for i in j + 1..n {
            let mut s = a[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)].conj();
            }
            l[(i, j)] = s / d;
        }
    }
    Ok(l)
}

/// Solves `L X = B` for lower-triangular `L`.
pub fn solve_lower(l: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = check_triangle(l, b)?;
    let p = b.cols();
    flops::charge(|c| c.triangular_solve(n, p));
    let mut x = b.clone();
    for i in 0..n {
        let d = l[(i, i)];
        for col in 0..p {
            let mut s = x[(i, col)];
            for k in 0..i {
                s -= l[(i, k)] * x[(k, col)];
            }
            x[(i, col)] = s / d;
        }
    }
    Ok(x)
}

/// Solves `Lᴴ X = B` for lower-triangular `L`.
pub fn solve_lower_adjoint(l: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = check_triangle(l, b)?;
    let p = b.cols();
    flops::charge(|c| c.triangular_solve(n, p));
    let mut x = b.clone();
    for i in (0..n).rev() {
        let d = l[(i, i)].conj();
        for col in 0..p {
            let mut s = x[(i, col)];
            for k in i + 1..n {
                s -= l[(k, i)].conj() * x[(k, col)];
            }
            x[(i, col)] = s / d;
        }
    }
    Ok(x)
}

/// Solves `A X = B` for Hermitian positive definite `A`.
pub fn solve_hpd(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    let l = cholesky(a)?;
    solve_lower_adjoint(&l, &solve_lower(&l, b)?)
}

fn check_triangle(l: &ComplexMatrix, b: &ComplexMatrix) -> Result<usize> {
    let n = l.rows();
    if l.cols() != n || b.rows() != n {
        return Err(Error::Shape(format!(
            "triangular solve with a {}x{} factor and {} right-hand rows",
            n,
            l.cols(),
            b.rows()
        )));
    }
    if (0..n).any(|i| l[(i, i)].norm() == 0.0) {
        return Err(Error::Singular("zero on the triangular diagonal".into()));
    }
    Ok(n)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hpd(n: usize) -> ComplexMatrix {
        let b = ComplexMatrix::from_fn(n + 2, n, |i, j| {
            C64::new((i as f64 + 0.3 * j as f64).sin(), (i * j) as f64 * 0.1)
        });
        b.adjoint()
            .matmul(&b)
            .unwrap()
            .add(&ComplexMatrix::identity(n))
            .unwrap()
    }

    #[test]
    fn factor_reconstructs() {
        let a = hpd(4);
        let l = cholesky(&a).unwrap();
        let llh = l.matmul(&l.adjoint()).unwrap();
        assert!(llh.sub(&a).unwrap().norm_fro() < 1e-12 * a.norm_fro());
    }

    #[test]
    fn solve_matches() {
        let a = hpd(3);
        let b = ComplexMatrix::from_fn(3, 2, |i, j| C64::new(i as f64, j as f64 - 1.0));
        let x = solve_hpd(&a, &b).unwrap();
        assert!(a.matmul(&x).unwrap().sub(&b).unwrap().norm_fro() < 1e-12);
    }

    #[test]
    fn indefinite_is_singular() {
        let a = ComplexMatrix::diag_real(&[1.0, -1.0]);
        assert!(matches!(cholesky(&a), Err(Error::Singular(_))));
        assert!(matches!(
            cholesky(&ComplexMatrix::zeros(2, 2)),
            Err(Error::Singular(_))
        ));
    }
}
