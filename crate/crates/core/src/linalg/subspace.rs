use alloc::format;
use alloc::vec::Vec;

#[cfg(not(feature = "std"))]
use num_traits::Float;

use super::{householder, jacobi, relative_tolerance};
use crate::error::{Error, Result};
use crate::flops;
use crate::{ComplexMatrix, C64};

/// Orthonormal basis of a subspace of `C^n`, stored as the ROWS of a
/// `t x n` matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct SubspaceBasis {
    basis: ComplexMatrix,
    ambient_dim: usize,
    tol: f64,
}

impl SubspaceBasis {
    /// Wraps a row-orthonormal matrix, checking `‖B Bᴴ − I‖_F ≤ 1e-10 √t`.
    pub fn new(basis: ComplexMatrix, tol: f64) -> Result<Self> {
        basis.ensure_finite("basis")?;
        let t = basis.rows();
        if t > basis.cols() {
            return Err(Error::InvalidInput(format!(
                "{t} basis vectors cannot be independent in C^{}",
                basis.cols()
            )));
        }
        let err = basis.row_orthonormality_error();
        if err > 1e-10 * (t.max(1) as f64).sqrt() {
            return Err(Error::InvalidInput(format!(
                "basis rows are not orthonormal (‖BBᴴ−I‖_F = {err:.3e})"
            )));
        }
        Ok(Self::from_parts(basis, tol))
    }

    pub(crate) fn from_parts(basis: ComplexMatrix, tol: f64) -> Self {
        Self {
            ambient_dim: basis.cols(),
            basis,
            tol,
        }
    }

    /// The whole space `C^n`, basis `I_n`.
    pub fn identity(n: usize) -> Self {
        Self::from_parts(ComplexMatrix::identity(n), 0.0)
    }

    /// The zero subspace of `C^n`.
    pub fn empty(n: usize) -> Self {
        Self::from_parts(ComplexMatrix::zeros(0, n), 0.0)
    }

    /// Span of the canonical unit vectors `e_i`, `i ∈ indices`.
    pub fn coordinate(indices: &[usize], n: usize) -> Result<Self> {
        let mut b = ComplexMatrix::zeros(indices.len(), n);
        for (row, &i) in indices.iter().enumerate() {
            if i >= n {
                return Err(Error::InvalidInput(format!("coordinate {i} outside C^{n}")));
            }
            b[(row, i)] = C64::new(1.0, 0.0);
        }
        Self::new(b, 0.0)
    }

    pub fn basis(&self) -> &ComplexMatrix {
        &self.basis
    }

    pub fn into_basis(self) -> ComplexMatrix {
        self.basis
    }

    /// Number of basis vectors.
    pub fn dim(&self) -> usize {
        self.basis.rows()
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    /// Relative rank tolerance used when the basis was computed.
    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn is_identity(&self) -> bool {
        self.basis.is_identity()
    }

    /// Orthogonal projector `Bᴴ B`.
    pub fn projector(&self) -> ComplexMatrix {
        self.basis.adjoint_matmul_unmetered(&self.basis)
    }
}

/// Left nullspace of `t_mat` (`t x m`): an orthonormal basis of
/// `{w : w t_mat = 0}` stored as rows.
///
/// The basis vectors are the (adjoint) left singular vectors whose singular
/// values are at most `tol_eff = tol · σ_max`. A `tol` of zero selects
/// `max(t, m) · ε`. Tall inputs go through a Householder QR first and the
/// SVD is taken of the small triangular factor; wide inputs are handled by a
/// one-sided Jacobi SVD of `t_matᴴ`.
pub fn left_nullspace_basis(t_mat: &ComplexMatrix, tol: f64) -> Result<SubspaceBasis> {
    t_mat.ensure_finite("matrix")?;
    if !(tol >= 0.0) {
        return Err(Error::InvalidInput(format!(
            "tolerance {tol} must be non-negative"
        )));
    }
    let (t, m) = t_mat.shape();
    let rel = relative_tolerance(tol, t, m);
    if t == 0 {
        return Ok(SubspaceBasis::from_parts(ComplexMatrix::zeros(0, 0), rel));
    }
    if m == 0 || t_mat.max_abs() == 0.0 {
        return Ok(SubspaceBasis::from_parts(ComplexMatrix::identity(t), rel));
    }

    if t >= m {
        let (refl, r) = householder::factor(t_mat);
        let sv = jacobi::svd(&r, false);
        let rank = rank_of(&sv.sigma, rel);
        flops::charge(|c| {
            c.householder_qr(t, m) + c.singular_values(m) + c.apply_reflectors(t, m, t - rank)
        });

        // Left null vectors of T are Q [ũ; 0] for ũ ⟂ range(R), plus the
        // trailing columns of Q.
        let k = t - rank;
        let mut e = ComplexMatrix::zeros(t, k);
        if rank < m {
            flops::charge(|c| c.householder_qr(m, rank) + c.apply_reflectors(m, rank, m - rank));
            let comp = orthonormal_complement(&sv.u.col_block(0, rank));
            for i in 0..m {
                for j in 0..m - rank {
                    e[(i, j)] = comp[(i, j)];
                }
            }
        }
        for i in m..t {
            e[(i, i - rank)] = C64::new(1.0, 0.0);
        }
        refl.apply_q(&mut e);
        Ok(SubspaceBasis::from_parts(e.adjoint(), rel))
    } else {
        // T = V Σ Uᴴ where Tᴴ = U Σ Vᴴ; the left singular vectors of T are V.
        let sv = jacobi::svd(&t_mat.adjoint(), true);
        let rank = rank_of(&sv.sigma, rel);
        flops::charge(|c| c.right_svd(m, t));
        let v = sv.v.expect("requested right vectors");
        Ok(SubspaceBasis::from_parts(
            v.col_block(rank, t).adjoint(),
            rel,
        ))
    }
}

/// `W z` where the rows of `W` span the left nullspace of `t_mat = z A`.
///
/// Same basis as [`left_nullspace_basis`] on tall inputs, but `W` is never
/// formed: the Householder reflectors of `t_mat` are applied to `z` directly
/// and the leading rows are dropped.
pub(crate) fn restrict_rows(
    z: &ComplexMatrix,
    t_mat: &ComplexMatrix,
    tol: f64,
) -> Result<(ComplexMatrix, f64)> {
    t_mat.ensure_finite("matrix")?;
    let (t, m) = t_mat.shape();
    let n = z.cols();
    let rel = relative_tolerance(tol, t, m);
    if z.rows() != t {
        return Err(Error::Shape(format!(
            "basis has {} rows but the projected block has {t}",
            z.rows()
        )));
    }
    if t == 0 {
        return Ok((ComplexMatrix::zeros(0, n), rel));
    }
    if m == 0 || t_mat.max_abs() == 0.0 {
        return Ok((z.clone(), rel));
    }
    if t < m {
        let w = left_nullspace_basis(t_mat, tol)?;
        return Ok((w.basis().matmul(z)?, rel));
    }

    let (refl, r) = householder::factor(t_mat);
    let sv = jacobi::svd(&r, false);
    let rank = rank_of(&sv.sigma, rel);
    flops::charge(|c| c.householder_qr(t, m) + c.singular_values(m) + c.apply_reflectors(t, m, n));
    let mut x = z.clone();
    refl.apply_q_adjoint(&mut x);
    let tail = x.row_block(m, t);
    if rank == m {
        return Ok((tail, rel));
    }
    flops::charge(|c| {
        c.householder_qr(m, rank) + c.apply_reflectors(m, rank, m - rank) + c.matmul(m - rank, m, n)
    });
    let comp = orthonormal_complement(&sv.u.col_block(0, rank));
    let head = comp.adjoint().matmul_unmetered(&x.row_block(0, m));
    Ok((ComplexMatrix::vstack(&[&head, &tail])?, rel))
}

/// Orthonormal basis of the orthogonal complement of the columns of `u`
/// (`n x r`, orthonormal columns), returned as an `n x (n − r)` matrix.
/// Unmetered.
pub(crate) fn orthonormal_complement(u: &ComplexMatrix) -> ComplexMatrix {
    let (n, r) = u.shape();
    let (refl, _) = householder::factor(u);
    let mut e = ComplexMatrix::zeros(n, n - r);
    for j in 0..n - r {
        e[(r + j, j)] = C64::new(1.0, 0.0);
    }
    refl.apply_q(&mut e);
    e
}

pub(crate) fn rank_of(sigma: &[f64], rel: f64) -> usize {
    let Some(&smax) = sigma.first() else {
        return 0;
    };
    if smax == 0.0 {
        return 0;
    }
    sigma.iter().filter(|&&s| s > rel * smax).count()
}

/// Singular values of `a` in non-increasing order.
pub fn singular_values(a: &ComplexMatrix) -> Result<Vec<f64>> {
    a.ensure_finite("matrix")?;
    let (m, n) = a.shape();
    if m == 0 || n == 0 {
        return Ok(Vec::new());
    }
    let (tall, rows, cols) = if m >= n {
        (a.clone(), m, n)
    } else {
        (a.adjoint(), n, m)
    };
    flops::charge(|c| c.householder_qr(rows, cols) + c.singular_values(cols));
    let (_, r) = householder::factor(&tall);
    Ok(jacobi::svd(&r, false).sigma)
}

/// Number of singular values above `tol_eff` (see [`left_nullspace_basis`]).
pub fn numerical_rank(a: &ComplexMatrix, tol: f64) -> Result<usize> {
    let sigma = singular_values(a)?;
    Ok(rank_of(&sigma, relative_tolerance(tol, a.rows(), a.cols())))
}

/// `‖P₁ − P₂‖_F` with `P_k = B_kᴴ B_k`; zero iff the subspaces coincide.
pub fn subspace_distance(b1: &SubspaceBasis, b2: &SubspaceBasis) -> Result<f64> {
    if b1.ambient_dim != b2.ambient_dim {
        return Err(Error::InvalidInput(format!(
            "subspaces live in C^{} and C^{}",
            b1.ambient_dim, b2.ambient_dim
        )));
    }
    let n = b1.ambient_dim;
    flops::charge(|c| c.matmul(n, b1.dim(), n) + c.matmul(n, b2.dim(), n));
    let diff = b1.projector().sub(&b2.projector())?;
    Ok(diff.norm_fro())
}
