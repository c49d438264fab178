use alloc::format;
use alloc::vec::Vec;

use super::{DecouplerKind, DecouplerSet, SystemChannel};
use crate::error::{Error, Result};
use crate::linalg::{full_svd, pseudo_inverse_with_tol, rank_of, relative_tolerance};
use crate::ComplexMatrix;

/// Decouplers from one full SVD per user.
///
/// With `H̄_i = U Σ Vᴴ` and `r = rank(H̄_i)`, the trailing columns
/// `Ū⁽⁰⁾ = U[:, r..]` span the left nullspace and `W_i = (Ū⁽⁰⁾)† = Ū⁽⁰⁾ᴴ`.
pub fn svd_decoupler(sys: &SystemChannel) -> Result<DecouplerSet> {
    let n_r = sys.n_r();
    let mut w = Vec::with_capacity(sys.num_users());
    for i in 0..sys.num_users() {
        let hbar = sys.complementary(i);
        if hbar.cols() == 0 {
            w.push(ComplexMatrix::identity(n_r));
            continue;
        }
        let svd = full_svd(&hbar)?;
        let r = rank_of(&svd.sigma, relative_tolerance(0.0, n_r, hbar.cols()));
        w.push(svd.u.col_block(r, n_r).adjoint());
    }
    Ok(DecouplerSet::new(DecouplerKind::Svd, w, true))
}

/// Zero-forcing decouplers: `W_i` is user `i`'s row block of `H†`, so
/// `W_i H_i = I` and `W_i H_k = 0` for `k ≠ i`.
pub fn pinv_decoupler(sys: &SystemChannel) -> Result<DecouplerSet> {
    let (n_r, m) = (sys.n_r(), sys.total_streams());
    if m > n_r {
        return Err(Error::Singular(format!(
            "{m} streams exceed N_R = {n_r}; the channel cannot have full column rank"
        )));
    }
    let (pinv, rank) = pseudo_inverse_with_tol(&sys.stacked(), 0.0)?;
    if rank < m {
        return Err(Error::Singular(format!(
            "channel has rank {rank} < {m} streams"
        )));
    }
    let w = (0..sys.num_users())
        .map(|i| {
            let off = sys.offset(i);
            pinv.row_block(off, off + sys.user(i).cols())
        })
        .collect();
    Ok(DecouplerSet::new(DecouplerKind::Pinv, w, false))
}
