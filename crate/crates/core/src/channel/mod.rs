//! Seeded channel and noise generators.
//!
//! Every generator is a pure function of an [`RngSeed`]: a 64-bit seed and
//! a stream id select an independent ChaCha8 keystream, so parallel trials
//! can draw from disjoint streams in any order.

mod params;
mod seed;

pub use params::{CeErrorParams, KroneckerParams, LargeScaleParams};
pub use seed::{RngSeed, StreamPurpose};

use alloc::format;
use alloc::vec::Vec;

#[cfg(not(feature = "std"))]
use num_traits::Float;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::sqrt_psd;
use crate::{ComplexMatrix, C64};

/// Draws `n` samples of `CN(0, var)`.
pub fn sample_cn<R: Rng + ?Sized>(rng: &mut R, var: f64, n: usize) -> Vec<C64> {
    let s = (var / 2.0).sqrt();
    (0..n)
        .map(|_| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            C64::new(re * s, im * s)
        })
        .collect()
}

/// `n_r x m_i` matrix with i.i.d. `CN(0, 1)` entries.
pub fn gen_iid_channel(seed: RngSeed, n_r: usize, m_i: usize) -> ComplexMatrix {
    let data = sample_cn(&mut seed.rng(), 1.0, n_r * m_i);
    ComplexMatrix::from_vec(n_r, m_i, data).expect("length matches")
}

/// `(S)_{jk} = ρ^{(j−k)²}`.
pub fn correlation_matrix(rho: f64, n: usize) -> Result<ComplexMatrix> {
    if !(0.0..1.0).contains(&rho) {
        return Err(Error::InvalidInput(format!(
            "correlation {rho} outside [0, 1)"
        )));
    }
    Ok(ComplexMatrix::from_fn(n, n, |j, k| {
        let d = j.abs_diff(k) as i32;
        C64::new(rho.powi(d * d), 0.0)
    }))
}

/// `S_rx^{1/2} H S_tx^{1/2}`.
pub fn kronecker_correlate(
    h: &ComplexMatrix,
    s_tx: &ComplexMatrix,
    s_rx: &ComplexMatrix,
) -> Result<ComplexMatrix> {
    KroneckerFactors::from_matrices(s_tx, s_rx)?.apply(h)
}

/// Precomputed square roots of the transmit and receive correlations.
#[derive(Clone, Debug)]
pub struct KroneckerFactors {
    tx_root: ComplexMatrix,
    rx_root: ComplexMatrix,
}

impl KroneckerFactors {
    pub fn new(params: &KroneckerParams, n_r: usize, m_i: usize) -> Result<Self> {
        params.validate()?;
        Self::from_matrices(
            &correlation_matrix(params.rho_tx, m_i)?,
            &correlation_matrix(params.rho_rx, n_r)?,
        )
    }

    pub fn from_matrices(s_tx: &ComplexMatrix, s_rx: &ComplexMatrix) -> Result<Self> {
        Ok(Self {
            tx_root: sqrt_psd(s_tx)?,
            rx_root: sqrt_psd(s_rx)?,
        })
    }

    pub fn apply(&self, h: &ComplexMatrix) -> Result<ComplexMatrix> {
        if h.rows() != self.rx_root.rows() || h.cols() != self.tx_root.rows() {
            return Err(Error::Shape(format!(
                "channel is {}x{} but the correlations are {}x{} and {}x{}",
                h.rows(),
                h.cols(),
                self.rx_root.rows(),
                self.rx_root.rows(),
                self.tx_root.rows(),
                self.tx_root.rows()
            )));
        }
        let left = if self.rx_root.is_identity() {
            h.clone()
        } else {
            self.rx_root.matmul_unmetered(h)
        };
        Ok(if self.tx_root.is_identity() {
            left
        } else {
            left.matmul_unmetered(&self.tx_root)
        })
    }
}

/// Large-scale amplitude `10^{μ ν / 10} √(L / d^τ)` with `ν ~ N(0, 1)`.
pub fn large_scale_gain(params: &LargeScaleParams, seed: RngSeed) -> f64 {
    let nu: f64 = seed.rng().sample(StandardNormal);
    10f64.powf(params.mu_db * nu / 10.0) * params.path_gain()
}

/// `Γ H` with `Γ = g I`, one shadowing draw per call.
pub fn apply_large_scale(
    h: &ComplexMatrix,
    params: &LargeScaleParams,
    seed: RngSeed,
) -> Result<ComplexMatrix> {
    params.validate()?;
    Ok(h.scale(large_scale_gain(params, seed)))
}

/// `H + ΔH` with `ΔH` i.i.d. `CN(0, σ_e²)`.
pub fn perturb_channel(
    h: &ComplexMatrix,
    ce: &CeErrorParams,
    seed: RngSeed,
) -> Result<ComplexMatrix> {
    ce.validate()?;
    if ce.sigma_e2 == 0.0 {
        return Ok(h.clone());
    }
    let delta = sample_cn(&mut seed.rng(), ce.sigma_e2, h.rows() * h.cols());
    let delta = ComplexMatrix::from_vec(h.rows(), h.cols(), delta)?;
    h.add(&delta)
}

/// `n` samples of `CN(0, σ_n²)`.
pub fn gen_awgn(seed: RngSeed, sigma_n2: f64, n: usize) -> Result<Vec<C64>> {
    if !(sigma_n2 >= 0.0) || !sigma_n2.is_finite() {
        return Err(Error::InvalidInput(format!(
            "noise variance {sigma_n2} is invalid"
        )));
    }
    if sigma_n2 == 0.0 {
        return Ok(alloc::vec![C64::new(0.0, 0.0); n]);
    }
    Ok(sample_cn(&mut seed.rng(), sigma_n2, n))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn correlation_first_row() {
        let s = correlation_matrix(0.25, 3).unwrap();
        assert_eq!(s[(0, 1)].re, 0.25);
        assert_eq!(s[(0, 2)].re, 0.00390625);
        assert_eq!(s, s.transpose());
        assert_eq!(
            correlation_matrix(0.0, 4).unwrap(),
            ComplexMatrix::identity(4)
        );
        assert!(correlation_matrix(1.0, 2).is_err());
        assert!(correlation_matrix(-0.1, 2).is_err());
    }

    #[test]
    fn determinism() {
        let s = RngSeed::new(7, 3);
        assert_eq!(gen_iid_channel(s, 4, 2), gen_iid_channel(s, 4, 2));
        assert_ne!(
            gen_iid_channel(s, 4, 2),
            gen_iid_channel(RngSeed::new(7, 4), 4, 2)
        );
    }

    #[test]
    fn identity_correlation_is_passthrough() {
        let h = gen_iid_channel(RngSeed::new(1, 0), 5, 2);
        let out = kronecker_correlate(&h, &ComplexMatrix::identity(2), &ComplexMatrix::identity(5))
            .unwrap();
        assert_eq!(out, h);
    }

    #[test]
    fn unit_large_scale_is_passthrough() {
        let h = gen_iid_channel(RngSeed::new(1, 0), 3, 2);
        let p = LargeScaleParams {
            mu_db: 0.0,
            l_path: 1.0,
            d_rel: 1.0,
            tau: 3.0,
        };
        assert_eq!(apply_large_scale(&h, &p, RngSeed::new(9, 9)).unwrap(), h);
    }

    #[test]
    fn zero_noise_and_zero_error() {
        assert!(gen_awgn(RngSeed::new(0, 0), 0.0, 3)
            .unwrap()
            .iter()
            .all(|z| z.norm() == 0.0));
        let h = gen_iid_channel(RngSeed::new(2, 0), 3, 2);
        let ce = CeErrorParams { sigma_e2: 0.0 };
        assert_eq!(perturb_channel(&h, &ce, RngSeed::new(0, 1)).unwrap(), h);
    }
}
