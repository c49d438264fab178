use alloc::format;
use alloc::vec::Vec;

use super::{DecouplerSet, SystemChannel};
use crate::error::{Error, Result};
use crate::linalg::{rank_of, relative_tolerance};

/// Outcome of [`verify_decoupling`].
#[derive(Clone, Debug, PartialEq)]
pub struct DecouplingReport {
    /// `max_{i, k≠i} ‖W_i H_k‖_F / ‖H_k‖_F`.
    pub max_cross_residual: f64,
    pub per_user: Vec<UserCheck>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct UserCheck {
    pub user: usize,
    /// `max_{k≠i} ‖W_i H_k‖_F / ‖H_k‖_F`.
    pub max_cross_residual: f64,
    /// Numerical rank of `W_i H_i`.
    pub effective_rank: usize,
    /// `effective_rank == M_i`.
    pub full_rank: bool,
    /// `‖W_i W_iᴴ − I‖_F`.
    pub orthonormality_error: f64,
}

impl DecouplingReport {
    pub fn all_full_rank(&self) -> bool {
        self.per_user.iter().all(|u| u.full_rank)
    }
}

/// Measures how well `dec` separates the users of `sys`. Unmetered.
pub fn verify_decoupling(sys: &SystemChannel, dec: &DecouplerSet) -> Result<DecouplingReport> {
    if dec.len() != sys.num_users() {
        return Err(Error::Shape(format!(
            "{} decouplers for {} users",
            dec.len(),
            sys.num_users()
        )));
    }
    let mut per_user = Vec::with_capacity(dec.len());
    for (i, w) in dec.matrices().iter().enumerate() {
        if w.cols() != sys.n_r() {
            return Err(Error::Shape(format!(
                "decoupler {i} has {} columns, expected N_R = {}",
                w.cols(),
                sys.n_r()
            )));
        }
        let mut worst: f64 = 0.0;
        for (k, h) in sys.users().iter().enumerate() {
            if k == i {
                continue;
            }
            let scale = h.norm_fro();
            let res = w.matmul_unmetered(h).norm_fro();
            let rel = if scale > 0.0 { res / scale } else { res };
            worst = worst.max(rel);
        }
        let eff = w.matmul_unmetered(sys.user(i));
        // Measured into a scratch counter so the caller's tally is untouched.
        let sigma = crate::flops::measure(&crate::flops::CostModel::default(), || {
            crate::linalg::singular_values(&eff)
        })
        .0?;
        let effective_rank = rank_of(
            &sigma,
            relative_tolerance(0.0, eff.rows(), eff.cols()) * 1e3,
        );
        per_user.push(UserCheck {
            user: i,
            max_cross_residual: worst,
            effective_rank,
            full_rank: effective_rank == sys.user(i).cols(),
            orthonormality_error: w.row_orthonormality_error(),
        });
    }
    Ok(DecouplingReport {
        max_cross_residual: per_user
            .iter()
            .map(|u| u.max_cross_residual)
            .fold(0.0, f64::max),
        per_user,
    })
}
