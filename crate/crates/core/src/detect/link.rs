use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{cholesky, solve_lower};
use crate::{ComplexMatrix, C64};

/// One user's decoupled link `ỹ = H̃ x + ñ` with `H̃ = W H_i`, `ñ = W n`.
#[derive(Clone, Debug, PartialEq)]
pub struct EffectiveLink {
    pub y_tilde: Vec<C64>,
    pub h_tilde: ComplexMatrix,
    /// `σ_n² W Wᴴ`.
    pub noise_cov: ComplexMatrix,
    pub sigma_n2: f64,
    /// `W Wᴴ`.
    pub gram: ComplexMatrix,
}

/// Applies decoupler `w` to the received vector `y` and to the user's
/// channel `h`.
pub fn build_link(
    w: &ComplexMatrix,
    h: &ComplexMatrix,
    y: &[C64],
    sigma_n2: f64,
) -> Result<EffectiveLink> {
    if w.cols() != h.rows() || y.len() != w.cols() {
        return Err(Error::Shape(format!(
            "decoupler {}x{}, channel {}x{}, received vector of length {}",
            w.rows(),
            w.cols(),
            h.rows(),
            h.cols(),
            y.len()
        )));
    }
    if !(sigma_n2 >= 0.0) {
        return Err(Error::InvalidInput(format!("noise variance {sigma_n2}")));
    }
    let gram = w.matmul(&w.adjoint())?;
    Ok(EffectiveLink {
        y_tilde: w.mul_vec(y)?,
        h_tilde: w.matmul(h)?,
        noise_cov: gram.scale(sigma_n2),
        sigma_n2,
        gram,
    })
}

impl EffectiveLink {
    /// Rows of `H̃`.
    pub fn dim(&self) -> usize {
        self.h_tilde.rows()
    }

    /// Streams of the user.
    pub fn streams(&self) -> usize {
        self.h_tilde.cols()
    }

    /// The link premultiplied by `L⁻¹` with `W Wᴴ = L Lᴴ`, whose noise is
    /// white with variance `σ_n²`.
    pub fn whitened(&self) -> Result<Self> {
        let l = cholesky(&self.gram)?;
        let y = solve_lower(&l, &ComplexMatrix::column(&self.y_tilde))?;
        let n = self.dim();
        Ok(Self {
            y_tilde: y.into_vec(),
            h_tilde: solve_lower(&l, &self.h_tilde)?,
            noise_cov: ComplexMatrix::identity(n).scale(self.sigma_n2),
            sigma_n2: self.sigma_n2,
            gram: ComplexMatrix::identity(n),
        })
    }
}
