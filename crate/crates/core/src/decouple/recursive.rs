use alloc::format;

use crate::error::{Error, Result};
use crate::linalg::{left_nullspace_basis, restrict_rows, SubspaceBasis};
use crate::ComplexMatrix;

/// Common left nullspace of `blocks`, restricted to the row space of `z0`.
///
/// Each step projects the next block onto the current basis
/// (`T = Z A_i`), takes the left nullspace `W` of `T` and composes
/// `Z <- W Z`. The product is formed by applying the Householder reflectors
/// of `T` to `Z`, so `W` itself is never built. Products of row-orthonormal
/// factors stay row-orthonormal, and the row space after the last step is
/// `R(z0ᴴ) ∩ K(A_1ᴴ) ∩ ... ∩ K(A_kᴴ)`.
///
/// An exact identity `Z` is never multiplied: the first step then reduces to
/// `W = null(A_1)`. Blocks without columns are skipped.
pub fn recursive_common_nullspace(
    blocks: &[ComplexMatrix],
    z0: &SubspaceBasis,
) -> Result<SubspaceBasis> {
    recursive_common_nullspace_with_tol(blocks, z0, 0.0)
}

/// [`recursive_common_nullspace`] with an explicit rank tolerance for the
/// inner nullspace computations.
pub fn recursive_common_nullspace_with_tol(
    blocks: &[ComplexMatrix],
    z0: &SubspaceBasis,
    tol: f64,
) -> Result<SubspaceBasis> {
    let n = z0.ambient_dim();
    for (i, a) in blocks.iter().enumerate() {
        if a.rows() != n {
            return Err(Error::InvalidInput(format!(
                "block {i} has {} rows but the basis lives in C^{n}",
                a.rows()
            )));
        }
    }
    let mut z = z0.clone();
    for a in blocks.iter().filter(|a| a.cols() > 0) {
        z = step(&z, a, tol)?;
    }
    Ok(z)
}

fn step(z: &SubspaceBasis, a: &ComplexMatrix, tol: f64) -> Result<SubspaceBasis> {
    if z.is_identity() {
        return left_nullspace_basis(a, tol);
    }
    let t = z.basis().matmul(a)?;
    let (next, rel) = restrict_rows(z.basis(), &t, tol)?;
    Ok(SubspaceBasis::from_parts(next, rel))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::subspace_distance;
    use crate::C64;
    use alloc::vec;

    #[test]
    fn no_blocks_returns_start() {
        let z = recursive_common_nullspace(&[], &SubspaceBasis::identity(4)).unwrap();
        assert_eq!(z, SubspaceBasis::identity(4));
    }

    #[test]
    fn annihilates_one_coordinate() {
        let e2 = ComplexMatrix::identity(4).col_block(1, 2);
        let z = recursive_common_nullspace(&[e2], &SubspaceBasis::identity(4)).unwrap();
        let want = SubspaceBasis::coordinate(&[0, 2, 3], 4).unwrap();
        assert!(subspace_distance(&z, &want).unwrap() < 1e-10);
    }

    #[test]
    fn rejects_ambient_mismatch() {
        let a = ComplexMatrix::zeros(3, 1);
        assert!(recursive_common_nullspace(&[a], &SubspaceBasis::identity(4)).is_err());
    }

    #[test]
    fn restricted_start() {
        // Start inside span{e1, e2, e3}, annihilate e1 + e4: only e2, e3 stay.
        let z0 = SubspaceBasis::coordinate(&[0, 1, 2], 4).unwrap();
        let mut a = ComplexMatrix::zeros(4, 1);
        a[(0, 0)] = C64::new(1.0, 0.0);
        a[(3, 0)] = C64::new(1.0, 0.0);
        let z = recursive_common_nullspace(&vec![a], &z0).unwrap();
        let want = SubspaceBasis::coordinate(&[1, 2], 4).unwrap();
        assert!(subspace_distance(&z, &want).unwrap() < 1e-12);
    }
}
