//! Dense complex kernels: nullspaces, QR, SVD, pseudo-inverse, Cholesky and
//! Hermitian eigendecomposition.
//!
//! All SVDs go through one backend: Householder QR down to a square
//! triangle, then a one-sided Jacobi SVD of that triangle. Singular values
//! come out non-increasing.
//!
//! Public kernels charge their model cost to the FLOP meter (see
//! [`crate::flops`]); helpers used only for channel generation do not.

mod cholesky;
mod eigh;
mod householder;
mod jacobi;
mod pinv;
mod qr;
mod subspace;
mod svd;

pub use cholesky::{cholesky, solve_hpd, solve_lower, solve_lower_adjoint};
pub use eigh::{eigh, sqrt_psd, HermitianEigen};
pub use pinv::{pseudo_inverse, pseudo_inverse_with_tol};
pub use qr::{qr_decompose, QrFactors};
pub use subspace::{
    left_nullspace_basis, numerical_rank, singular_values, subspace_distance, SubspaceBasis,
};
pub use svd::{full_svd, FullSvd};

pub(crate) use subspace::{rank_of, restrict_rows};

/// Relative rank tolerance: `tol` itself, or `max(rows, cols) · ε` when
/// `tol` is zero.
pub fn relative_tolerance(tol: f64, rows: usize, cols: usize) -> f64 {
    if tol > 0.0 {
        tol
    } else {
        rows.max(cols).max(1) as f64 * f64::EPSILON
    }
}
