use super::{householder, jacobi, rank_of, relative_tolerance};
use crate::error::{Error, Result};
use crate::flops;
use crate::ComplexMatrix;

/// Moore–Penrose pseudo-inverse with the default rank tolerance.
pub fn pseudo_inverse(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    pseudo_inverse_with_tol(a, 0.0).map(|(p, _)| p)
}

/// Pseudo-inverse together with the numerical rank used. Singular values at
/// or below `tol_eff · σ_max` are treated as zero.
pub fn pseudo_inverse_with_tol(a: &ComplexMatrix, tol: f64) -> Result<(ComplexMatrix, usize)> {
    a.ensure_finite("matrix")?;
    if !(tol >= 0.0) {
        return Err(Error::InvalidInput(alloc::format!(
            "tolerance {tol} must be non-negative"
        )));
    }
    let (n, m) = a.shape();
    if n >= m {
        Ok(pinv_tall(a, tol))
    } else {
        let (p, r) = pinv_tall(&a.adjoint(), tol);
        Ok((p.adjoint(), r))
    }
}

/// `A = Q R`, `R = U Σ Vᴴ`, so `A† = V Σ⁻¹ (Q U)ᴴ` restricted to the rank.
fn pinv_tall(a: &ComplexMatrix, tol: f64) -> (ComplexMatrix, usize) {
    let (n, m) = a.shape();
    if m == 0 {
        return (ComplexMatrix::zeros(0, n), 0);
    }
    let (refl, r) = householder::factor(a);
    let sv = jacobi::svd(&r, true);
    let rank = rank_of(&sv.sigma, relative_tolerance(tol, n, m));
    flops::charge(|c| c.thin_svd(n, m) + c.matmul(m, rank, n));

    let v = sv.v.expect("requested right vectors");
    let mut qu = ComplexMatrix::zeros(n, rank);
    for i in 0..m {
        for j in 0..rank {
            qu[(i, j)] = sv.u[(i, j)];
        }
    }
    refl.apply_q(&mut qu);
    let vs = ComplexMatrix::from_fn(m, rank, |i, j| v[(i, j)] / sv.sigma[j]);
    let mut out = ComplexMatrix::zeros(m, n);
    for i in 0..m {
        for k in 0..rank {
            let x = vs[(i, k)];
            for j in 0..n {
                out[(i, j)] += x * qu[(j, k)].conj();
            }
        }
    }
    (out, rank)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::C64;

    #[test]
    fn identity() {
        assert_eq!(
            pseudo_inverse(&ComplexMatrix::identity(3)).unwrap(),
            ComplexMatrix::identity(3)
        );
    }

    #[test]
    fn diagonal_with_zero() {
        let p = pseudo_inverse(&ComplexMatrix::diag_real(&[2.0, 0.0])).unwrap();
        let want = ComplexMatrix::diag_real(&[0.5, 0.0]);
        assert!(p.sub(&want).unwrap().norm_fro() < 1e-15);
    }

    #[test]
    fn row_orthonormal_gives_adjoint() {
        let b = super::super::left_nullspace_basis(
            &ComplexMatrix::from_fn(5, 2, |i, j| C64::new((i + 2 * j) as f64, 1.0 - j as f64)),
            0.0,
        )
        .unwrap();
        let w = b.basis();
        let p = pseudo_inverse(w).unwrap();
        assert!(p.sub(&w.adjoint()).unwrap().norm_fro() < 1e-10);
    }
}
