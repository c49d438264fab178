//! FLOP benchmarks: K and M_i sweeps, and the user-inclusion sweep.

use seqdec_core::channel::{gen_iid_channel, RngSeed, StreamPurpose};
use seqdec_core::decouple::{
    self, include_users, sequential_decoupler, DecouplerKind, InclusionOptions, SystemChannel,
};
use seqdec_core::flops::{estimate_flops, measure, Algorithm, CostModel, SystemDescriptor};
use seqdec_core::{ComplexMatrix, Error};
use serde::Serialize;

use crate::audit::projector_distance;
use crate::config::SimConfig;
use crate::error::Result;

/// One row of `flops.csv`. Ratios use the estimated counts.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FlopRecord {
    /// `k` or `m_i`: which parameter the sweep varies.
    pub sweep: String,
    pub k: usize,
    pub m_i: usize,
    pub n_r: usize,
    pub algorithm: String,
    pub flops_estimated: u64,
    pub flops_instrumented: Option<u64>,
    pub ratio_to_svd: f64,
    pub ratio_to_pinv: f64,
}

impl FlopRecord {
    pub const HEADER: &'static [&'static str] = &[
        "sweep",
        "k",
        "m_i",
        "n_r",
        "algorithm",
        "flops_estimated",
        "flops_instrumented",
        "ratio_to_svd",
        "ratio_to_pinv",
    ];
}

/// One row of `include.csv`: cumulative SD-UI cost after `p` inclusions
/// against rebuilding the augmented system from scratch.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IncludeRecord {
    pub p: usize,
    pub k: usize,
    pub n_r: usize,
    pub sdui_instrumented: u64,
    pub sdui_estimated: u64,
    pub sd_instrumented: u64,
    pub sd_estimated: u64,
    pub pinv_instrumented: u64,
    pub pinv_estimated: u64,
    pub ratio_to_sd: f64,
    pub ratio_to_pinv: f64,
    /// Largest per-user distance between the SD-UI and fresh SD subspaces.
    pub max_subspace_distance: f64,
}

impl IncludeRecord {
    pub const HEADER: &'static [&'static str] = &[
        "p",
        "k",
        "n_r",
        "sdui_instrumented",
        "sdui_estimated",
        "sd_instrumented",
        "sd_estimated",
        "pinv_instrumented",
        "pinv_estimated",
        "ratio_to_sd",
        "ratio_to_pinv",
        "max_subspace_distance",
    ];
}

/// Random i.i.d. channels for `dims`; `point` keeps sweep entries apart.
pub fn random_system(seed: u64, point: u64, n_r: usize, dims: &[usize]) -> Result<SystemChannel> {
    let users = dims
        .iter()
        .enumerate()
        .map(|(i, &m)| {
            gen_iid_channel(
                RngSeed::derive(seed, StreamPurpose::Channel, point, i as u64),
                n_r,
                m,
            )
        })
        .collect();
    Ok(SystemChannel::new(n_r, users)?)
}

/// Instrumented FLOPs of building `kind` decouplers for `sys`.
pub fn instrumented_flops(
    kind: DecouplerKind,
    sys: &SystemChannel,
    model: &CostModel,
) -> Result<u64> {
    let (set, flops) = measure(model, || decouple::build(kind, sys));
    set?;
    Ok(flops)
}

fn algorithm_of(kind: DecouplerKind) -> Algorithm {
    match kind {
        DecouplerKind::Sd => Algorithm::Sd,
        DecouplerKind::Svd => Algorithm::Svd,
        DecouplerKind::Pinv => Algorithm::Pinv,
    }
}

/// The K sweep at `flops.m_i` followed by the M_i sweep at `flops.k_fixed`,
/// each with `N_R = M + flops.n_r_margin`.
pub fn run_flop_bench(cfg: &SimConfig) -> Result<Vec<FlopRecord>> {
    let f = &cfg.flops;
    let points = f
        .k_sweep
        .iter()
        .map(|&k| ("k", k, f.m_i))
        .chain(f.m_i_sweep.iter().map(|&m| ("m_i", f.k_fixed, m)));
    let mut rows = Vec::new();
    for (point, (sweep, k, m_i)) in points.enumerate() {
        let n_r = k * m_i + f.n_r_margin;
        match flop_point(cfg, point as u64, sweep, k, m_i, n_r) {
            Ok(r) => rows.extend(r),
            Err(crate::SimError::Core(e @ (Error::Infeasible { .. } | Error::InvalidInput(_)))) => {
                eprintln!("warning: skipping {sweep} sweep entry K={k}, M_i={m_i}: {e}");
            }
            Err(e) => return Err(e),
        }
    }
    Ok(rows)
}

fn flop_point(
    cfg: &SimConfig,
    point: u64,
    sweep: &str,
    k: usize,
    m_i: usize,
    n_r: usize,
) -> Result<Vec<FlopRecord>> {
    let model = &cfg.cost_model;
    let desc = SystemDescriptor::uniform(n_r, k, m_i);
    let kinds = [DecouplerKind::Sd, DecouplerKind::Svd, DecouplerKind::Pinv];
    let estimated = kinds
        .iter()
        .map(|&kind| Ok(estimate_flops(algorithm_of(kind), &desc, model)?.total))
        .collect::<Result<Vec<_>>>()?;
    let instrumented = if cfg.flops.instrumented {
        let sys = random_system(cfg.seed, point, n_r, &vec![m_i; k])?;
        let counts = kinds
            .iter()
            .map(|&kind| instrumented_flops(kind, &sys, model))
            .collect::<Result<Vec<_>>>()?;
        counts.into_iter().map(Some).collect()
    } else {
        vec![None; kinds.len()]
    };
    Ok(kinds
        .iter()
        .enumerate()
        .map(|(j, &kind)| FlopRecord {
            sweep: sweep.into(),
            k,
            m_i,
            n_r,
            algorithm: kind.name().into(),
            flops_estimated: estimated[j],
            flops_instrumented: instrumented[j],
            ratio_to_svd: estimated[j] as f64 / estimated[1] as f64,
            ratio_to_pinv: estimated[j] as f64 / estimated[2] as f64,
        })
        .collect())
}

/// Adds `include.new_users` users one at a time to `system` and compares the
/// cumulative SD-UI cost with rebuilding SD or PINV after each step.
pub fn run_include_bench(cfg: &SimConfig) -> Result<Vec<IncludeRecord>> {
    let model = &cfg.cost_model;
    let n_r = cfg.system.n_r;
    let dims = cfg.system.dims();
    let new_dims = vec![cfg.include.new_m_i; cfg.include.new_users];
    let base = random_system(cfg.seed, 0, n_r, &dims)?;
    let fresh: Vec<ComplexMatrix> = new_dims
        .iter()
        .enumerate()
        .map(|(j, &m)| {
            let idx = (dims.len() + j) as u64;
            gen_iid_channel(
                RngSeed::derive(cfg.seed, StreamPurpose::Channel, 0, idx),
                n_r,
                m,
            )
        })
        .collect();

    let mut sys = base.clone();
    let mut set = sequential_decoupler(&base)?;
    let mut cumulative = 0u64;
    let mut rows = Vec::new();
    for p in 1..=new_dims.len() {
        let h_new = &fresh[p - 1];
        let step = measure(model, || {
            include_users(
                &sys,
                &set,
                std::slice::from_ref(h_new),
                &InclusionOptions::default(),
            )
        });
        let (next_sys, next_set) = match step.0 {
            Ok(v) => v,
            Err(e @ Error::Infeasible { .. }) => {
                eprintln!("warning: stopping inclusion sweep at P={p}: {e}");
                break;
            }
            Err(e) => return Err(e.into()),
        };
        cumulative += step.1;
        sys = next_sys;
        set = next_set;

        let (sd, sd_flops) = measure(model, || sequential_decoupler(&sys));
        let sd = sd?;
        let pinv_flops = instrumented_flops(DecouplerKind::Pinv, &sys, model)?;
        let desc = SystemDescriptor {
            n_r,
            user_dims: dims.clone(),
            new_users: new_dims[..p].to_vec(),
        };
        let aug = desc.augmented();
        let sdui_est = estimate_flops(Algorithm::SdUi, &desc, model)?.total;
        let sd_est = estimate_flops(Algorithm::Sd, &aug, model)?.total;
        let pinv_est = estimate_flops(Algorithm::Pinv, &aug, model)?.total;
        let mut dist: f64 = 0.0;
        for (a, b) in set.matrices().iter().zip(sd.matrices()) {
            dist = dist.max(projector_distance(a, b)?);
        }
        rows.push(IncludeRecord {
            p,
            k: sys.num_users(),
            n_r,
            sdui_instrumented: cumulative,
            sdui_estimated: sdui_est,
            sd_instrumented: sd_flops,
            sd_estimated: sd_est,
            pinv_instrumented: pinv_flops,
            pinv_estimated: pinv_est,
            ratio_to_sd: cumulative as f64 / sd_flops as f64,
            ratio_to_pinv: cumulative as f64 / pinv_flops as f64,
            max_subspace_distance: dist,
        });
    }
    Ok(rows)
}
