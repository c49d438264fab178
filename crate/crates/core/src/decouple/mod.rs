//! Decoupler constructions and the decoupling verifier.

mod baselines;
mod include;
mod recursive;
mod sequential;
mod set;
mod system;
mod verify;

pub use baselines::{pinv_decoupler, svd_decoupler};
pub use include::{include_users, InclusionOptions};
pub use recursive::{recursive_common_nullspace, recursive_common_nullspace_with_tol};
pub use sequential::{
    partition_tree, sequential_decoupler, split_pending, tree_depth, PartitionNode,
};
pub use set::{DecouplerKind, DecouplerSet};
pub use system::{check_feasible, SystemChannel};
pub use verify::{verify_decoupling, DecouplingReport, UserCheck};

use crate::error::Result;

/// Runs the construction named by `kind`.
pub fn build(kind: DecouplerKind, sys: &SystemChannel) -> Result<DecouplerSet> {
    match kind {
        DecouplerKind::Sd => sequential_decoupler(sys),
        DecouplerKind::Svd => svd_decoupler(sys),
        DecouplerKind::Pinv => pinv_decoupler(sys),
    }
}
