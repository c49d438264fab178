//! Where channel realisations come from.

use std::collections::BTreeMap;

use seqdec_core::channel::{
    apply_large_scale, gen_iid_channel, perturb_channel, KroneckerFactors, RngSeed, StreamPurpose,
};
use seqdec_core::ComplexMatrix;

use crate::config::ChannelConfig;
use crate::error::Result;

/// A true channel and the receiver's estimate of it.
#[derive(Clone, Debug)]
pub struct UserDraw {
    pub true_channel: ComplexMatrix,
    pub estimate: ComplexMatrix,
}

/// Supplies per-user channel draws for one trial.
///
/// The harness calls [`ChannelSource::draw`] once per (trial, user). A
/// frequency-selective generator can be plugged in by mapping `trial` to a
/// (realisation, subcarrier) pair.
pub trait ChannelSource: Sync {
    fn draw(&self, trial: u64, user: usize, n_r: usize, m_i: usize) -> Result<UserDraw>;

    /// `E[|h|²]` per entry of the true channel, used to set the noise level.
    fn mean_entry_power(&self) -> f64;
}

/// Rayleigh fading with optional Kronecker correlation, log-normal shadowing
/// and Gaussian estimation error, applied in that order.
pub struct ModelSource {
    seed: u64,
    cfg: ChannelConfig,
    factors: BTreeMap<usize, KroneckerFactors>,
}

impl ModelSource {
    pub fn new(seed: u64, cfg: &ChannelConfig, n_r: usize, dims: &[usize]) -> Result<Self> {
        let mut factors = BTreeMap::new();
        if let Some(p) = &cfg.kronecker {
            for &m in dims {
                if let std::collections::btree_map::Entry::Vacant(e) = factors.entry(m) {
                    e.insert(KroneckerFactors::new(p, n_r, m)?);
                }
            }
        }
        Ok(Self {
            seed,
            cfg: cfg.clone(),
            factors,
        })
    }
}

impl ChannelSource for ModelSource {
    fn draw(&self, trial: u64, user: usize, n_r: usize, m_i: usize) -> Result<UserDraw> {
        let idx = user as u64;
        let mut h = gen_iid_channel(
            RngSeed::derive(self.seed, StreamPurpose::Channel, trial, idx),
            n_r,
            m_i,
        );
        if let Some(p) = &self.cfg.kronecker {
            h = match self.factors.get(&m_i) {
                Some(f) => f.apply(&h)?,
                None => KroneckerFactors::new(p, n_r, m_i)?.apply(&h)?,
            };
        }
        if let Some(p) = &self.cfg.large_scale {
            h = apply_large_scale(
                &h,
                p,
                RngSeed::derive(self.seed, StreamPurpose::LargeScale, trial, idx),
            )?;
        }
        let estimate = match &self.cfg.ce_error {
            Some(ce) => perturb_channel(
                &h,
                ce,
                RngSeed::derive(self.seed, StreamPurpose::CeError, trial, idx),
            )?,
            None => h.clone(),
        };
        Ok(UserDraw {
            true_channel: h,
            estimate,
        })
    }

    fn mean_entry_power(&self) -> f64 {
        self.cfg
            .large_scale
            .as_ref()
            .map_or(1.0, |p| p.mean_power())
    }
}
