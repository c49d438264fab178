//! Monte-Carlo BER sweep over every (decoupler, detector) arm.
//!
//! All arms see the same channels, bits and noise (common random numbers),
//! so differences between arms come from the algorithms alone.

use rand::RngCore;
use rayon::prelude::*;
use seqdec_core::channel::{gen_awgn, RngSeed, StreamPurpose};
use seqdec_core::decouple::{self, DecouplerKind, SystemChannel};
use seqdec_core::detect::{lmmse_filter, sic_detect_with, Constellation};
use seqdec_core::linalg::{cholesky, qr_decompose, solve_lower, QrFactors};
use seqdec_core::{ComplexMatrix, C64};
use serde::Serialize;

use crate::config::{DetectorKind, SimConfig};
use crate::error::Result;
use crate::source::{ChannelSource, ModelSource};

/// How the noise variance follows from the SNR grid.
pub const SNR_DEFINITION: &str = "SNR = average received energy of one symbol at one receive \
    antenna over noise variance; sigma_n^2 = E[|h|^2] / 10^(snr_db/10) with unit-energy \
    symbols and E[|h|^2] the mean power of one channel entry";

/// One row of `ber.csv`. `user` is a user index or `all`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BerRecord {
    pub decoupler: String,
    pub detector: String,
    pub snr_db: f64,
    pub user: String,
    pub bit_errors: u64,
    pub bits_sent: u64,
    pub ber: f64,
    pub stderr: f64,
}

impl BerRecord {
    pub const HEADER: &'static [&'static str] = &[
        "decoupler",
        "detector",
        "snr_db",
        "user",
        "bit_errors",
        "bits_sent",
        "ber",
        "stderr",
    ];

    fn new(
        decoupler: DecouplerKind,
        detector: DetectorKind,
        snr_db: f64,
        user: String,
        bit_errors: u64,
        bits_sent: u64,
    ) -> Self {
        let ber = bit_errors as f64 / bits_sent as f64;
        Self {
            decoupler: decoupler.name().into(),
            detector: detector.name().into(),
            snr_db,
            user,
            bit_errors,
            bits_sent,
            ber,
            stderr: (ber * (1.0 - ber) / bits_sent as f64).sqrt(),
        }
    }
}

/// Per-SNR tallies of one arm.
#[derive(Clone, Debug, PartialEq)]
pub struct BerCurve {
    pub decoupler: DecouplerKind,
    pub detector: DetectorKind,
    /// `per_user[u][s]` for user `u` at SNR index `s`.
    pub per_user: Vec<Vec<BerRecord>>,
    pub aggregate: Vec<BerRecord>,
}

impl BerCurve {
    pub fn point(&self, snr_db: f64) -> Option<&BerRecord> {
        self.aggregate.iter().find(|r| r.snr_db == snr_db)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BerResult {
    pub curves: Vec<BerCurve>,
    /// Noise variance used at each grid point.
    pub sigma_n2: Vec<f64>,
}

impl BerResult {
    pub fn curve(&self, decoupler: DecouplerKind, detector: DetectorKind) -> Option<&BerCurve> {
        self.curves
            .iter()
            .find(|c| c.decoupler == decoupler && c.detector == detector)
    }

    /// Rows in arm, SNR, user order; the aggregate follows the users.
    pub fn records(&self) -> Vec<BerRecord> {
        let mut out = Vec::new();
        for c in &self.curves {
            for (s, agg) in c.aggregate.iter().enumerate() {
                for u in &c.per_user {
                    out.push(u[s].clone());
                }
                out.push(agg.clone());
            }
        }
        out
    }
}

/// `σ_n²` for each grid point.
pub fn noise_variances(cfg: &SimConfig, mean_entry_power: f64) -> Vec<f64> {
    cfg.ber
        .snr_db
        .iter()
        .map(|db| mean_entry_power / 10f64.powf(db / 10.0))
        .collect()
}

/// Runs the configured sweep on the built-in channel models.
pub fn run_ber_sweep(cfg: &SimConfig) -> Result<BerResult> {
    let dims = cfg.system.dims();
    let source = ModelSource::new(cfg.seed, &cfg.channel, cfg.system.n_r, &dims)?;
    run_ber_sweep_with(cfg, &source)
}

/// Runs the configured sweep on channels from `source`.
///
/// Trial `t` draws one channel per user and sends `vectors_per_channel`
/// symbol vectors through it at every SNR point. Tallies are integers and
/// merged by addition, so the result does not depend on scheduling.
pub fn run_ber_sweep_with(cfg: &SimConfig, source: &dyn ChannelSource) -> Result<BerResult> {
    let cons = cfg.validate_ber()?;
    let dims = cfg.system.dims();
    let sigma_n2 = noise_variances(cfg, source.mean_entry_power());
    let m: usize = dims.iter().sum();
    let per_vector = (m * cons.bits_per_symbol()) as u64;
    let vectors = (cfg.ber.bits_per_point / per_vector) as usize;
    let vpc = cfg.ber.vectors_per_channel;
    let trials = vectors.div_ceil(vpc);
    let ctx = TrialContext {
        cfg,
        cons: &cons,
        dims: &dims,
        sigma_n2: &sigma_n2,
        source,
    };
    let size = ctx.tally_len();
    let run = || {
        (0..trials)
            .into_par_iter()
            .map(|t| {
                let n = vpc.min(vectors - t * vpc);
                ctx.run_trial(t as u64, n)
            })
            .try_reduce(
                || vec![0u64; size],
                |mut a, b| {
                    a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                    Ok(a)
                },
            )
    };
    let errors = crate::with_threads(cfg.threads, run)??;
    Ok(ctx.collect(&errors, vectors as u64))
}

struct TrialContext<'a> {
    cfg: &'a SimConfig,
    cons: &'a Constellation,
    dims: &'a [usize],
    sigma_n2: &'a [f64],
    source: &'a dyn ChannelSource,
}

/// Decoupler of one user, ready for detection.
struct PreparedUser {
    /// `W`, or `L⁻¹ W` when whitening.
    transform: ComplexMatrix,
    /// LMMSE filter per SNR point.
    lmmse: Vec<ComplexMatrix>,
    qr: Option<QrFactors>,
}

impl TrialContext<'_> {
    fn arms(&self) -> usize {
        self.cfg.ber.decouplers.len() * self.cfg.ber.detectors.len()
    }

    /// Layout `[arm][snr][user]`.
    fn tally_len(&self) -> usize {
        self.arms() * self.sigma_n2.len() * self.dims.len()
    }

    fn index(&self, arm: usize, snr: usize, user: usize) -> usize {
        (arm * self.sigma_n2.len() + snr) * self.dims.len() + user
    }

    fn prepare(&self, w: &ComplexMatrix, h_est: &ComplexMatrix) -> Result<PreparedUser> {
        let transform = if self.cfg.ber.whitening {
            let l = cholesky(&w.matmul(&w.adjoint())?)?;
            solve_lower(&l, w)?
        } else {
            w.clone()
        };
        let h_eff = transform.matmul(h_est)?;
        let dets = &self.cfg.ber.detectors;
        let lmmse = if dets.contains(&DetectorKind::Lmmse) {
            self.sigma_n2
                .iter()
                .map(|&s2| lmmse_filter(&h_eff, s2))
                .collect::<seqdec_core::Result<_>>()?
        } else {
            Vec::new()
        };
        let qr = if dets.contains(&DetectorKind::Sic) {
            Some(qr_decompose(&h_eff)?)
        } else {
            None
        };
        Ok(PreparedUser {
            transform,
            lmmse,
            qr,
        })
    }

    fn run_trial(&self, trial: u64, n_vectors: usize) -> Result<Vec<u64>> {
        let n_r = self.cfg.system.n_r;
        let draws = self
            .dims
            .iter()
            .enumerate()
            .map(|(i, &m_i)| self.source.draw(trial, i, n_r, m_i))
            .collect::<Result<Vec<_>>>()?;
        let estimated =
            SystemChannel::new(n_r, draws.iter().map(|d| d.estimate.clone()).collect())?;
        let h_true =
            ComplexMatrix::hstack(&draws.iter().map(|d| &d.true_channel).collect::<Vec<_>>())?;

        let mut prepared = Vec::with_capacity(self.cfg.ber.decouplers.len());
        for &kind in &self.cfg.ber.decouplers {
            let set = decouple::build(kind, &estimated)?;
            let users = set
                .matrices()
                .iter()
                .zip(estimated.users())
                .map(|(w, h)| self.prepare(w, h))
                .collect::<Result<Vec<_>>>()?;
            prepared.push(users);
        }

        let bps = self.cons.bits_per_symbol();
        let m: usize = self.dims.iter().sum();
        let offsets: Vec<usize> = self
            .dims
            .iter()
            .scan(0, |acc, &d| {
                let o = *acc;
                *acc += d;
                Some(o)
            })
            .collect();
        let mut errors = vec![0u64; self.tally_len()];
        for (s, &s2) in self.sigma_n2.iter().enumerate() {
            let bits = random_bits(
                RngSeed::derive(self.cfg.seed, StreamPurpose::Bits, trial, s as u64),
                n_vectors * m * bps,
            );
            let noise = gen_awgn(
                RngSeed::derive(self.cfg.seed, StreamPurpose::Noise, trial, s as u64),
                s2,
                n_vectors * n_r,
            )?;
            for v in 0..n_vectors {
                let sent = &bits[v * m * bps..(v + 1) * m * bps];
                let x = self.cons.modulate(sent)?;
                let mut y = h_true.mul_vec(&x)?;
                for (yi, ni) in y.iter_mut().zip(&noise[v * n_r..(v + 1) * n_r]) {
                    *yi += ni;
                }
                for (d, users) in prepared.iter().enumerate() {
                    for (u, p) in users.iter().enumerate() {
                        let y_tilde = p.transform.mul_vec(&y)?;
                        let own = &sent[offsets[u] * bps..(offsets[u] + self.dims[u]) * bps];
                        for (e, &det) in self.cfg.ber.detectors.iter().enumerate() {
                            let x_hat = match det {
                                DetectorKind::Lmmse => p.lmmse[s]
                                    .mul_vec(&y_tilde)?
                                    .into_iter()
                                    .map(|z| self.cons.slice(z))
                                    .collect(),
                                DetectorKind::Sic => {
                                    sic_detect_with(p.qr.as_ref().unwrap(), &y_tilde, self.cons)?
                                }
                            };
                            let arm = d * self.cfg.ber.detectors.len() + e;
                            errors[self.index(arm, s, u)] += bit_errors(self.cons, &x_hat, own);
                        }
                    }
                }
            }
        }
        Ok(errors)
    }

    fn collect(&self, errors: &[u64], vectors: u64) -> BerResult {
        let bps = self.cons.bits_per_symbol() as u64;
        let mut curves = Vec::new();
        for (d, &dec) in self.cfg.ber.decouplers.iter().enumerate() {
            for (e, &det) in self.cfg.ber.detectors.iter().enumerate() {
                let arm = d * self.cfg.ber.detectors.len() + e;
                let mut per_user = vec![Vec::new(); self.dims.len()];
                let mut aggregate = Vec::new();
                for (s, &snr) in self.cfg.ber.snr_db.iter().enumerate() {
                    let mut total = 0;
                    for (u, &m_u) in self.dims.iter().enumerate() {
                        let errs = errors[self.index(arm, s, u)];
                        total += errs;
                        per_user[u].push(BerRecord::new(
                            dec,
                            det,
                            snr,
                            u.to_string(),
                            errs,
                            vectors * m_u as u64 * bps,
                        ));
                    }
                    aggregate.push(BerRecord::new(
                        dec,
                        det,
                        snr,
                        "all".into(),
                        total,
                        self.cfg.ber.bits_per_point,
                    ));
                }
                curves.push(BerCurve {
                    decoupler: dec,
                    detector: det,
                    per_user,
                    aggregate,
                });
            }
        }
        BerResult {
            curves,
            sigma_n2: self.sigma_n2.to_vec(),
        }
    }
}

fn random_bits(seed: RngSeed, n: usize) -> Vec<u8> {
    let mut rng = seed.rng();
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let word = rng.next_u64();
        let take = (n - out.len()).min(64);
        out.extend((0..take).map(|b| ((word >> b) & 1) as u8));
    }
    out
}

fn bit_errors(cons: &Constellation, x_hat: &[C64], sent: &[u8]) -> u64 {
    cons.demodulate(x_hat)
        .iter()
        .zip(sent)
        .filter(|(a, b)| a != b)
        .count() as u64
}
