use alloc::format;

use super::{recursive_common_nullspace_with_tol, DecouplerSet, SystemChannel};
use crate::error::{Error, Result};
use crate::linalg::SubspaceBasis;
use crate::ComplexMatrix;

/// Options for [`include_users`].
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct InclusionOptions {
    /// Update existing decouplers against `H_i` with `i` the inclusion
    /// counter (user `i − 1` of the current system) instead of against the
    /// newly added channel. Yields wrong decouplers; kept for comparison.
    pub literal_existing_update: bool,
    /// Rank tolerance of the nullspace steps; `0` selects the default.
    pub tol: f64,
}

/// Extends a sequential decoupler set with new users, one at a time.
///
/// For each new user the existing decoupler with the fewest rows, `W_p`, is
/// restricted further by `H_p`: it then annihilates every current user and
/// becomes the new user's decoupler. Every existing `W_j` is restricted by
/// the new user's channel.
///
/// Feasibility of the final system is checked before anything is computed.
pub fn include_users(
    sys: &SystemChannel,
    existing: &DecouplerSet,
    new_channels: &[ComplexMatrix],
    opts: &InclusionOptions,
) -> Result<(SystemChannel, DecouplerSet)> {
    if existing.len() != sys.num_users() {
        return Err(Error::InvalidInput(format!(
            "{} decouplers for {} users",
            existing.len(),
            sys.num_users()
        )));
    }
    for (i, w) in existing.matrices().iter().enumerate() {
        if w.cols() != sys.n_r() {
            return Err(Error::Shape(format!(
                "decoupler {i} has {} columns, expected N_R = {}",
                w.cols(),
                sys.n_r()
            )));
        }
    }
    let full = sys.with_users(new_channels)?;
    if new_channels.is_empty() {
        return Ok((full, existing.clone()));
    }

    let mut set = existing.clone();
    let k0 = sys.num_users();
    for (step, h_new) in new_channels.iter().enumerate() {
        let current = k0 + step;
        let bases = set.matrices_mut();
        let p = (0..current)
            .min_by_key(|&j| (bases[j].rows(), j))
            .expect("at least one user");
        let w_new = restrict(&bases[p], full.user(p), opts.tol)?;

        let update = if opts.literal_existing_update {
            full.user(step)
        } else {
            h_new
        };
        for j in 0..current {
            bases[j] = restrict(&bases[j], update, opts.tol)?;
        }
        bases.push(w_new);
    }
    Ok((full, set))
}

fn restrict(w: &ComplexMatrix, h: &ComplexMatrix, tol: f64) -> Result<ComplexMatrix> {
    let z0 = SubspaceBasis::from_parts(w.clone(), 0.0);
    Ok(recursive_common_nullspace_with_tol(core::slice::from_ref(h), &z0, tol)?.into_basis())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decouple::sequential_decoupler;

    #[test]
    fn no_new_users_is_identity_map() {
        let e = ComplexMatrix::identity(4);
        let sys = SystemChannel::new(4, alloc::vec![e.col_block(0, 1), e.col_block(1, 2)]).unwrap();
        let set = sequential_decoupler(&sys).unwrap();
        let (sys2, set2) = include_users(&sys, &set, &[], &InclusionOptions::default()).unwrap();
        assert_eq!(sys2, sys);
        assert_eq!(set2, set);
    }

    #[test]
    fn infeasible_augmentation_fails_first() {
        let e = ComplexMatrix::identity(3);
        let sys = SystemChannel::new(3, alloc::vec![e.col_block(0, 1), e.col_block(1, 2)]).unwrap();
        let set = sequential_decoupler(&sys).unwrap();
        let extra: Vec<ComplexMatrix> = (0..2).map(|_| e.col_block(2, 3)).collect();
        assert!(matches!(
            include_users(&sys, &set, &extra, &InclusionOptions::default()),
            Err(Error::Infeasible { .. })
        ));
    }
}
