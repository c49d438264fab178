use alloc::vec::Vec;

use super::{householder, jacobi, rank_of, relative_tolerance, subspace};
use crate::error::Result;
use crate::flops;
use crate::{ComplexMatrix, C64};

/// Full SVD `A = U Σ Vᴴ` with square unitary `U` and `V`.
#[derive(Clone, Debug)]
pub struct FullSvd {
    /// `m x m`.
    pub u: ComplexMatrix,
    /// `min(m, n)` values, non-increasing.
    pub sigma: Vec<f64>,
    /// `n x n`.
    pub v: ComplexMatrix,
}

/// Full SVD of an `m x n` matrix, charged as a full Golub–Reinsch SVD.
pub fn full_svd(a: &ComplexMatrix) -> Result<FullSvd> {
    a.ensure_finite("matrix")?;
    let (m, n) = a.shape();
    flops::charge(|c| c.full_svd(m, n));
    if m >= n {
        Ok(full_tall(a))
    } else {
        let t = full_tall(&a.adjoint());
        Ok(FullSvd {
            u: t.v,
            sigma: t.sigma,
            v: t.u,
        })
    }
}

fn full_tall(a: &ComplexMatrix) -> FullSvd {
    let (m, n) = a.shape();
    let (refl, r) = householder::factor(a);
    let sv = jacobi::svd(&r, true);
    let v = sv.v.expect("requested right vectors");

    // Columns of U_R at negligible σ are zero or noise; replace them by an
    // orthonormal completion.
    let nz = rank_of(&sv.sigma, relative_tolerance(0.0, m, n));
    let mut ur = sv.u;
    if nz < n {
        let comp = subspace::orthonormal_complement(&ur.col_block(0, nz));
        for i in 0..n {
            for j in nz..n {
                ur[(i, j)] = comp[(i, j - nz)];
            }
        }
    }
    let mut u = ComplexMatrix::zeros(m, m);
    for i in 0..n {
        for j in 0..n {
            u[(i, j)] = ur[(i, j)];
        }
    }
    for i in n..m {
        u[(i, i)] = C64::new(1.0, 0.0);
    }
    refl.apply_q(&mut u);
    FullSvd {
        u,
        sigma: sv.sigma,
        v,
    }
}
