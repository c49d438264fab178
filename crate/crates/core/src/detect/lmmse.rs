use alloc::format;
use alloc::vec::Vec;

use super::{Constellation, EffectiveLink};
use crate::error::{Error, Result};
use crate::linalg::solve_hpd;
use crate::{ComplexMatrix, C64};

/// `G = (H̃ᴴ H̃ + σ² I)⁻¹ H̃ᴴ`.
pub fn lmmse_filter(h_tilde: &ComplexMatrix, sigma_n2: f64) -> Result<ComplexMatrix> {
    if !(sigma_n2 >= 0.0) {
        return Err(Error::InvalidInput(format!("noise variance {sigma_n2}")));
    }
    let hh = h_tilde.adjoint();
    let mut normal = hh.matmul(h_tilde)?;
    for i in 0..normal.rows() {
        normal[(i, i)] += C64::new(sigma_n2, 0.0);
    }
    solve_hpd(&normal, &hh).map_err(|e| match e {
        Error::Singular(msg) => Error::Singular(format!("LMMSE normal matrix: {msg}")),
        other => other,
    })
}

/// Filter output `G ỹ` before slicing.
pub fn lmmse_filter_output(link: &EffectiveLink) -> Result<Vec<C64>> {
    lmmse_filter(&link.h_tilde, link.sigma_n2)?.mul_vec(&link.y_tilde)
}

/// Sliced LMMSE estimate of the user's symbol vector.
pub fn lmmse_detect(link: &EffectiveLink, cons: &Constellation) -> Result<Vec<C64>> {
    Ok(lmmse_filter_output(link)?
        .into_iter()
        .map(|z| cons.slice(z))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::detect::build_link;

    #[test]
    fn scalar_link() {
        let one = ComplexMatrix::identity(1);
        let link = build_link(&one, &one, &[C64::new(1.0, 0.0)], 1.0).unwrap();
        let out = lmmse_filter_output(&link).unwrap();
        assert!((out[0] - C64::new(0.5, 0.0)).norm() < 1e-15);
        let cons = Constellation::qpsk();
        assert!(cons
            .points()
            .contains(&lmmse_detect(&link, &cons).unwrap()[0]));
    }

    #[test]
    fn noiseless_identity_recovers() {
        let cons = Constellation::qpsk();
        let x = cons.modulate(&[0, 1, 1, 0]).unwrap();
        let i2 = ComplexMatrix::identity(2);
        let link = build_link(&i2, &i2, &x, 1e-12).unwrap();
        assert_eq!(lmmse_detect(&link, &cons).unwrap(), x);
    }

    #[test]
    fn singular_without_noise() {
        let h = ComplexMatrix::zeros(2, 1);
        assert!(matches!(lmmse_filter(&h, 0.0), Err(Error::Singular(_))));
    }
}
