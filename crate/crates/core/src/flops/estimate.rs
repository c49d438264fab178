//! Closed-form FLOP tallies that replay each algorithm's kernel calls with
//! generic (full) ranks.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::CostModel;
use crate::decouple::{check_feasible, split_pending, tree_depth};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Algorithm {
    Sd,
    Svd,
    Pinv,
    /// Inclusion of `new_users` into an existing sequential decoupler set.
    SdUi,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Self::Sd => "sd",
            Self::Svd => "svd",
            Self::Pinv => "pinv",
            Self::SdUi => "sd_ui",
        }
    }
}

impl core::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.name())
    }
}

/// Dimensions of a system, plus the stream counts of users to include.
#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SystemDescriptor {
    pub n_r: usize,
    pub user_dims: Vec<usize>,
    pub new_users: Vec<usize>,
}

impl SystemDescriptor {
    /// `K` users with `m_i` streams each.
    pub fn uniform(n_r: usize, k: usize, m_i: usize) -> Self {
        Self {
            n_r,
            user_dims: alloc::vec![m_i; k],
            new_users: Vec::new(),
        }
    }

    pub fn with_new_users(mut self, dims: Vec<usize>) -> Self {
        self.new_users = dims;
        self
    }

    pub fn k(&self) -> usize {
        self.user_dims.len()
    }

    pub fn total_streams(&self) -> usize {
        self.user_dims.iter().sum()
    }

    /// The descriptor after all `new_users` have joined.
    pub fn augmented(&self) -> Self {
        let mut dims = self.user_dims.clone();
        dims.extend_from_slice(&self.new_users);
        Self {
            n_r: self.n_r,
            user_dims: dims,
            new_users: Vec::new(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PhaseFlops {
    /// `level 1`, `user 3`, `inclusion 2`, ...
    pub label: String,
    pub flops: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FlopReport {
    pub algorithm: Algorithm,
    pub system: SystemDescriptor,
    /// Sum of `phases`.
    pub total: u64,
    pub phases: Vec<PhaseFlops>,
}

/// Closed-form FLOP count of `algorithm` on `system` under `model`.
///
/// The tally follows the exact sequence of metered kernel calls the
/// implementation makes, with every intermediate rank taken as generic, so
/// it matches the instrumented counter on full-rank channels.
pub fn estimate_flops(
    algorithm: Algorithm,
    system: &SystemDescriptor,
    model: &CostModel,
) -> Result<FlopReport> {
    if system.n_r == 0 || system.user_dims.is_empty() {
        return Err(Error::InvalidInput(
            "need N_R > 0 and at least one user".into(),
        ));
    }
    if system
        .user_dims
        .iter()
        .chain(&system.new_users)
        .any(|&m| m == 0)
    {
        return Err(Error::InvalidInput(
            "every user needs at least one stream".into(),
        ));
    }
    check_feasible(system.n_r, &system.user_dims)?;
    let mut tally = Tally {
        model,
        n_r: system.n_r,
        phases: Vec::new(),
    };
    match algorithm {
        Algorithm::Sd => sd(&mut tally, &system.user_dims),
        Algorithm::Svd => {
            let total: usize = system.user_dims.iter().sum();
            for (i, &m) in system.user_dims.iter().enumerate() {
                let mbar = total - m;
                let cost = if mbar == 0 {
                    0
                } else {
                    CostModel::round(model.full_svd(system.n_r, mbar))
                };
                tally.push(format!("user {}", i + 1), cost);
            }
        }
        Algorithm::Pinv => {
            let m = system.total_streams();
            if m > system.n_r {
                return Err(Error::Singular(format!(
                    "{m} streams exceed N_R = {}",
                    system.n_r
                )));
            }
            let cost = model.thin_svd(system.n_r, m) + model.matmul(m, m, system.n_r);
            tally.push("pinv".into(), CostModel::round(cost));
        }
        Algorithm::SdUi => {
            check_feasible(system.n_r, &system.augmented().user_dims)?;
            sd_ui(&mut tally, &system.user_dims, &system.new_users);
        }
    }
    let total = tally.phases.iter().map(|p| p.flops).sum();
    Ok(FlopReport {
        algorithm,
        system: system.clone(),
        total,
        phases: tally.phases,
    })
}

struct Tally<'a> {
    model: &'a CostModel,
    n_r: usize,
    phases: Vec<PhaseFlops>,
}

impl Tally<'_> {
    fn push(&mut self, label: String, flops: u64) {
        self.phases.push(PhaseFlops { label, flops });
    }

    fn matmul(&self, m: usize, n: usize, p: usize) -> u64 {
        CostModel::round(self.model.matmul(m, n, p))
    }

    /// Cost of the left nullspace of a generic `t x m` matrix and its
    /// dimension.
    fn nullspace(&self, t: usize, m: usize) -> (u64, usize) {
        if t == 0 {
            return (0, 0);
        }
        let c = self.model;
        if t >= m {
            let cost =
                c.householder_qr(t, m) + c.singular_values(m) + c.apply_reflectors(t, m, t - m);
            (CostModel::round(cost), t - m)
        } else {
            (CostModel::round(c.right_svd(m, t)), 0)
        }
    }

    /// One step of the recursive common nullspace: basis with `t` rows
    /// (exact identity when `identity`), block with `m` columns. Returns the
    /// cost and the new row count.
    fn restrict(&self, t: usize, identity: bool, m: usize) -> (u64, usize) {
        if m == 0 {
            return (0, t);
        }
        if identity {
            return self.nullspace(t, m);
        }
        let project = self.matmul(t, self.n_r, m);
        if t == 0 {
            return (project, 0);
        }
        let c = self.model;
        if t >= m {
            let null =
                c.householder_qr(t, m) + c.singular_values(m) + c.apply_reflectors(t, m, self.n_r);
            (project + CostModel::round(null), t - m)
        } else {
            (project + CostModel::round(c.right_svd(m, t)), 0)
        }
    }
}

fn sd(tally: &mut Tally<'_>, dims: &[usize]) {
    let depth = tree_depth(dims.len());
    let mut levels = alloc::vec![0u64; depth];
    let pending: Vec<usize> = (0..dims.len()).collect();
    sd_node(
        tally,
        dims,
        &pending,
        tally.n_r,
        true,
        0,
        depth,
        &mut levels,
    );
    for (l, flops) in levels.into_iter().enumerate() {
        tally.push(format!("level {}", l + 1), flops);
    }
}

#[allow(clippy::too_many_arguments)]
fn sd_node(
    tally: &Tally<'_>,
    dims: &[usize],
    pending: &[usize],
    rows: usize,
    identity: bool,
    level: usize,
    depth: usize,
    levels: &mut [u64],
) {
    if level == depth {
        return;
    }
    let (c1, c2) = split_pending(pending);
    for (keep, drop) in [(c1, c2), (c2, c1)] {
        if keep.is_empty() {
            continue;
        }
        let m: usize = drop.iter().map(|&u| dims[u]).sum();
        let (cost, next) = tally.restrict(rows, identity, m);
        levels[level] += cost;
        sd_node(
            tally,
            dims,
            keep,
            next,
            identity && m == 0,
            level + 1,
            depth,
            levels,
        );
    }
}

fn sd_ui(tally: &mut Tally<'_>, dims: &[usize], new_users: &[usize]) {
    let n_r = tally.n_r;
    let k = dims.len();
    let total: usize = dims.iter().sum();
    let mut dims = dims.to_vec();
    // Row counts of the current decouplers and whether each is still the
    // exact identity (only the lone user of a K = 1 system).
    let mut rows: Vec<usize> = dims.iter().map(|&m| n_r - (total - m)).collect();
    let mut identity: Vec<bool> = alloc::vec![k == 1; k];
    for (step, &m_new) in new_users.iter().enumerate() {
        let current = dims.len();
        let p = (0..current)
            .min_by_key(|&j| (rows[j], j))
            .expect("non-empty");
        let (mut cost, new_rows) = tally.restrict(rows[p], identity[p], dims[p]);
        for j in 0..current {
            let (c, r) = tally.restrict(rows[j], identity[j], m_new);
            cost += c;
            rows[j] = r;
            identity[j] = false;
        }
        rows.push(new_rows);
        identity.push(false);
        dims.push(m_new);
        tally.push(format!("inclusion {}", step + 1), cost);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_user_sd_is_free() {
        let r = estimate_flops(
            Algorithm::Sd,
            &SystemDescriptor::uniform(8, 1, 2),
            &CostModel::default(),
        )
        .unwrap();
        assert_eq!(r.total, 0);
    }

    #[test]
    fn total_is_sum_of_phases() {
        let model = CostModel::default();
        let sys = SystemDescriptor::uniform(40, 12, 2).with_new_users(alloc::vec![2, 2]);
        for alg in [
            Algorithm::Sd,
            Algorithm::Svd,
            Algorithm::Pinv,
            Algorithm::SdUi,
        ] {
            let r = estimate_flops(alg, &sys, &model).unwrap();
            assert_eq!(r.total, r.phases.iter().map(|p| p.flops).sum::<u64>());
            assert!(r.total > 0);
        }
    }

    #[test]
    fn infeasible_is_rejected() {
        let sys = SystemDescriptor::uniform(10, 6, 2);
        assert!(matches!(
            estimate_flops(Algorithm::Sd, &sys, &CostModel::default()),
            Err(Error::Infeasible { .. })
        ));
        let grow = SystemDescriptor::uniform(10, 4, 2).with_new_users(alloc::vec![2, 2]);
        assert!(matches!(
            estimate_flops(Algorithm::SdUi, &grow, &CostModel::default()),
            Err(Error::Infeasible { .. })
        ));
    }
}
