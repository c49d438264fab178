use alloc::format;

#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::error::{Error, Result};

/// Transmit and receive correlation coefficients of the Kronecker model.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct KroneckerParams {
    pub rho_tx: f64,
    pub rho_rx: f64,
}

impl KroneckerParams {
    pub fn validate(&self) -> Result<()> {
        for (name, rho) in [("rho_tx", self.rho_tx), ("rho_rx", self.rho_rx)] {
            if !(0.0..1.0).contains(&rho) {
                return Err(Error::InvalidInput(format!(
                    "{name} = {rho} outside [0, 1)"
                )));
            }
        }
        Ok(())
    }
}

/// Log-normal shadowing and path loss.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct LargeScaleParams {
    /// Shadowing spread `μ` in dB.
    pub mu_db: f64,
    /// Power path loss `L`.
    pub l_path: f64,
    /// Relative distance `d`.
    pub d_rel: f64,
    /// Path-loss exponent `τ`.
    pub tau: f64,
}

impl LargeScaleParams {
    pub fn validate(&self) -> Result<()> {
        let ok = self.mu_db.is_finite()
            && self.l_path > 0.0
            && self.d_rel > 0.0
            && self.tau >= 0.0
            && self.l_path.is_finite()
            && self.d_rel.is_finite()
            && self.tau.is_finite();
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!(
                "invalid large-scale parameters {self:?}"
            )))
        }
    }

    /// `√(L / d^τ)`.
    pub fn path_gain(&self) -> f64 {
        (self.l_path / self.d_rel.powf(self.tau)).sqrt()
    }

    /// `E[g²] = (L / d^τ) exp(2 (μ ln 10 / 10)²)`.
    pub fn mean_power(&self) -> f64 {
        let a = self.mu_db * core::f64::consts::LN_10 / 10.0;
        self.path_gain().powi(2) * (2.0 * a * a).exp()
    }
}

/// Channel-estimation error variance per entry.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct CeErrorParams {
    pub sigma_e2: f64,
}

impl CeErrorParams {
    pub fn validate(&self) -> Result<()> {
        if self.sigma_e2 >= 0.0 && self.sigma_e2.is_finite() {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!(
                "sigma_e2 = {} must be >= 0",
                self.sigma_e2
            )))
        }
    }
}
