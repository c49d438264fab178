use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::{Constellation, EffectiveLink};
use crate::error::{Error, Result};
use crate::linalg::{qr_decompose, QrFactors};
use crate::C64;

/// State of one QR-SIC pass over a link.
#[derive(Clone, Debug)]
pub struct SicWorkspace {
    pub qr: QrFactors,
    /// `Qᴴ ỹ`.
    pub v: Vec<C64>,
    /// Filled from the last stream to the first.
    pub decisions: Vec<Option<C64>>,
}

impl SicWorkspace {
    pub fn new(link: &EffectiveLink) -> Result<Self> {
        let qr = qr_decompose(&link.h_tilde)?;
        check_diagonal(&qr)?;
        Ok(Self::with_factors(qr, &link.y_tilde))
    }

    /// Workspace for a precomputed factorisation of `H̃`.
    pub fn with_factors(qr: QrFactors, y_tilde: &[C64]) -> Self {
        let v =
            qr.q.adjoint()
                .mul_vec(y_tilde)
                .expect("Q has ỹ's length in rows");
        let m = qr.r.rows();
        Self {
            qr,
            v,
            decisions: vec![None; m],
        }
    }

    /// `x̂_j = Q((v_j − Σ_{p>j} R_{jp} x̂_p) / R_{jj})` for `j = M_i … 1`.
    pub fn run(&mut self, cons: &Constellation) -> Result<Vec<C64>> {
        check_diagonal(&self.qr)?;
        let r = &self.qr.r;
        let m = r.rows();
        for j in (0..m).rev() {
            let mut acc = self.v[j];
            for p in j + 1..m {
                acc -= r[(j, p)] * self.decisions[p].expect("filled in reverse order");
            }
            self.decisions[j] = Some(cons.slice(acc / r[(j, j)]));
        }
        Ok(self
            .decisions
            .iter()
            .map(|d| d.expect("all filled"))
            .collect())
    }
}

fn check_diagonal(qr: &QrFactors) -> Result<()> {
    let r = &qr.r;
    let scale = r.max_abs();
    for j in 0..r.rows() {
        if r[(j, j)].norm() <= scale * 1e-14 {
            return Err(Error::Singular(format!(
                "R[{j},{j}] vanishes; H̃ lacks full column rank"
            )));
        }
    }
    Ok(())
}

/// QR successive interference cancellation in natural order.
pub fn sic_detect(link: &EffectiveLink, cons: &Constellation) -> Result<Vec<C64>> {
    SicWorkspace::new(link)?.run(cons)
}

/// SIC on `ỹ` with a precomputed factorisation of `H̃`.
pub fn sic_detect_with(qr: &QrFactors, y_tilde: &[C64], cons: &Constellation) -> Result<Vec<C64>> {
    if qr.q.rows() != y_tilde.len() {
        return Err(Error::Shape(format!(
            "Q has {} rows, ỹ has length {}",
            qr.q.rows(),
            y_tilde.len()
        )));
    }
    SicWorkspace::with_factors(qr.clone(), y_tilde).run(cons)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::detect::build_link;
    use crate::ComplexMatrix;

    #[test]
    fn diagonal_channel() {
        let cons = Constellation::qpsk();
        let x = cons.modulate(&[1, 0, 0, 1]).unwrap();
        let h = ComplexMatrix::identity(2).scale(2.0);
        let y = h.mul_vec(&x).unwrap();
        let link = build_link(&ComplexMatrix::identity(2), &h, &y, 0.0).unwrap();
        assert_eq!(sic_detect(&link, &cons).unwrap(), x);
    }

    #[test]
    fn rank_deficient_is_singular() {
        let h = ComplexMatrix::from_real(2, 2, &[1.0, 1.0, 1.0, 1.0]).unwrap();
        let link = build_link(
            &ComplexMatrix::identity(2),
            &h,
            &[C64::new(0.0, 0.0); 2],
            0.1,
        )
        .unwrap();
        assert!(matches!(
            sic_detect(&link, &Constellation::qpsk()),
            Err(Error::Singular(_))
        ));
    }
}
