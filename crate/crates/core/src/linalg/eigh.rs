use alloc::format;
use alloc::vec::Vec;

#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::{ComplexMatrix, C64};

const MAX_SWEEPS: usize = 60;

/// `A = V diag(λ) Vᴴ` for Hermitian `A`.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    /// Non-increasing.
    pub values: Vec<f64>,
    /// Unitary; column `j` pairs with `values[j]`.
    pub vectors: ComplexMatrix,
}

/// Cyclic two-sided Jacobi eigendecomposition of a Hermitian matrix.
/// Unmetered.
pub fn eigh(a: &ComplexMatrix) -> Result<HermitianEigen> {
    let n = a.rows();
    if a.cols() != n {
        return Err(Error::Shape(format!("eigh of a {}x{} matrix", n, a.cols())));
    }
    a.ensure_finite("matrix")?;
    let scale = a.max_abs().max(f64::MIN_POSITIVE);
    let herm = a.sub(&a.adjoint())?.max_abs();
    if herm > 1e-12 * scale {
        return Err(Error::InvalidInput(format!(
            "matrix is not Hermitian (max |A − Aᴴ| = {herm:.3e})"
        )));
    }

    let mut m = a.clone();
    for i in 0..n {
        m[(i, i)] = C64::new(m[(i, i)].re, 0.0);
    }
    let mut v = ComplexMatrix::identity(n);
    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[(i, j)].norm_sqr())
            .sum();
        if off.sqrt() <= f64::EPSILON * scale * 1e-2 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let b = m[(p, q)];
                let g = b.norm();
                if g == 0.0 {
                    continue;
                }
                // Phase-rotate to a real symmetric 2x2 block, then apply the
                // classical Jacobi rotation.
                let e = (b / g).conj();
                let theta = (m[(q, q)].re - m[(p, p)].re) / (2.0 * g);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                // Columns p, q of the unitary: [c, s; -s e, c e].
                let (u00, u01, u10, u11) = (C64::new(c, 0.0), C64::new(s, 0.0), -e * s, e * c);
                for k in 0..n {
                    let (x, y) = (m[(k, p)], m[(k, q)]);
                    m[(k, p)] = x * u00 + y * u10;
                    m[(k, q)] = x * u01 + y * u11;
                }
                for k in 0..n {
                    let (x, y) = (m[(p, k)], m[(q, k)]);
                    m[(p, k)] = u00.conj() * x + u10.conj() * y;
                    m[(q, k)] = u01.conj() * x + u11.conj() * y;
                }
                m[(p, q)] = C64::new(0.0, 0.0);
                m[(q, p)] = C64::new(0.0, 0.0);
                m[(p, p)] = C64::new(m[(p, p)].re, 0.0);
                m[(q, q)] = C64::new(m[(q, q)].re, 0.0);
                for k in 0..n {
                    let (x, y) = (v[(k, p)], v[(k, q)]);
                    v[(k, p)] = x * u00 + y * u10;
                    v[(k, q)] = x * u01 + y * u11;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(j, j)].re.total_cmp(&m[(i, i)].re));
    Ok(HermitianEigen {
        values: order.iter().map(|&i| m[(i, i)].re).collect(),
        vectors: ComplexMatrix::from_fn(n, n, |i, j| v[(i, order[j])]),
    })
}

/// Hermitian PSD square root `V diag(√λ) Vᴴ`.
///
/// Eigenvalues down to `-1e-10 · λ_max` are clamped to zero; anything more
/// negative is rejected.
pub fn sqrt_psd(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    let eig = eigh(a)?;
    let n = a.rows();
    let top = eig.values.first().copied().unwrap_or(0.0).max(0.0);
    let low = eig.values.last().copied().unwrap_or(0.0);
    if low < -1e-10 * top.max(f64::MIN_POSITIVE) {
        return Err(Error::InvalidInput(format!(
            "matrix is not positive semi-definite (eigenvalue {low:.3e})"
        )));
    }
    let roots: Vec<f64> = eig.values.iter().map(|&l| l.max(0.0).sqrt()).collect();
    let vs = ComplexMatrix::from_fn(n, n, |i, j| eig.vectors[(i, j)] * roots[j]);
    Ok(vs.matmul_unmetered(&eig.vectors.adjoint()))
}
