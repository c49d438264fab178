use alloc::vec::Vec;

use super::{recursive_common_nullspace, DecouplerKind, DecouplerSet, SystemChannel};
use crate::error::Result;
use crate::linalg::SubspaceBasis;
use crate::ComplexMatrix;

/// One node of the sequential-decoupler partition tree.
#[derive(Clone, Debug, PartialEq)]
pub struct PartitionNode {
    /// Depth, `0` at the root and `ν = ⌈log₂ K⌉` at the leaves.
    pub level: usize,
    /// Users whose channels `z` annihilates (`A`).
    pub processed: Vec<usize>,
    /// Users still to be separated below this node (`B`).
    pub pending: Vec<usize>,
    /// Accumulated common left nullspace `Z`.
    pub z: SubspaceBasis,
}

/// Tree depth `ν = ⌈log₂ K⌉`.
pub fn tree_depth(k: usize) -> usize {
    let mut depth = 0;
    while (1usize << depth) < k {
        depth += 1;
    }
    depth
}

/// Splits pending users into `C₁` (first `⌈ξ/2⌉`) and `C₂` (the rest).
pub fn split_pending(pending: &[usize]) -> (&[usize], &[usize]) {
    pending.split_at(pending.len().div_ceil(2))
}

/// Builds every user's decoupler with the sequential binary partition.
///
/// Each node hands its two children the same basis `Z`; child `j` then
/// annihilates the channels of the users kept by its sibling, passed to
/// [`recursive_common_nullspace`] as a single concatenated block. After
/// `ν` levels every non-empty leaf holds one user `i` and its `Z` spans the
/// left nullspace of `H̄_i`.
pub fn sequential_decoupler(sys: &SystemChannel) -> Result<DecouplerSet> {
    let mut w: Vec<Option<ComplexMatrix>> = alloc::vec![None; sys.num_users()];
    walk(sys, &mut |node| {
        if let [user] = node.pending[..] {
            if node.level == tree_depth(sys.num_users()) {
                w[user] = Some(node.z.basis().clone());
            }
        }
    })?;
    let w = w
        .into_iter()
        .map(|m| m.expect("every user reaches a leaf"))
        .collect();
    Ok(DecouplerSet::new(DecouplerKind::Sd, w, true))
}

/// Every node of the tree in depth-first order (root first, child 1 before
/// child 2). Leaves with nothing pending are included.
pub fn partition_tree(sys: &SystemChannel) -> Result<Vec<PartitionNode>> {
    let mut nodes = Vec::new();
    walk(sys, &mut |node| nodes.push(node.clone()))?;
    Ok(nodes)
}

fn walk(sys: &SystemChannel, visit: &mut dyn FnMut(&PartitionNode)) -> Result<()> {
    let root = PartitionNode {
        level: 0,
        processed: Vec::new(),
        pending: (0..sys.num_users()).collect(),
        z: SubspaceBasis::identity(sys.n_r()),
    };
    descend(sys, tree_depth(sys.num_users()), root, visit)
}

fn descend(
    sys: &SystemChannel,
    depth: usize,
    node: PartitionNode,
    visit: &mut dyn FnMut(&PartitionNode),
) -> Result<()> {
    visit(&node);
    if node.level == depth {
        return Ok(());
    }
    let (c1, c2) = split_pending(&node.pending);
    for (keep, drop) in [(c1, c2), (c2, c1)] {
        let mut processed = node.processed.clone();
        processed.extend_from_slice(drop);
        let z = if keep.is_empty() || drop.is_empty() {
            // Nothing left to separate below, or nothing to annihilate.
            if keep.is_empty() {
                processed.truncate(node.processed.len());
            }
            node.z.clone()
        } else {
            let blocks: Vec<&ComplexMatrix> = drop.iter().map(|&u| sys.user(u)).collect();
            let block = ComplexMatrix::hstack(&blocks)?;
            recursive_common_nullspace(core::slice::from_ref(&block), &node.z)?
        };
        let child = PartitionNode {
            level: node.level + 1,
            processed,
            pending: keep.to_vec(),
            z,
        };
        descend(sys, depth, child, visit)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::subspace_distance;

    #[test]
    fn depth_and_split() {
        assert_eq!([1, 2, 3, 4, 5, 8, 9].map(tree_depth), [0, 1, 2, 2, 3, 3, 4]);
        assert_eq!(
            split_pending(&[0, 1, 2, 3, 4]),
            (&[0, 1, 2][..], &[3, 4][..])
        );
        assert_eq!(split_pending(&[7]), (&[7][..], &[][..]));
    }

    #[test]
    fn single_user_is_identity() {
        let sys =
            SystemChannel::new(4, alloc::vec![ComplexMatrix::identity(4).col_block(0, 2)]).unwrap();
        let set = sequential_decoupler(&sys).unwrap();
        assert_eq!(set.get(0), &ComplexMatrix::identity(4));
    }

    #[test]
    fn coordinate_channels() {
        let e = ComplexMatrix::identity(3);
        let sys = SystemChannel::new(3, alloc::vec![e.col_block(0, 1), e.col_block(1, 2)]).unwrap();
        let set = sequential_decoupler(&sys).unwrap();
        assert_eq!(set.get(0).shape(), (2, 3));
        let w1 = SubspaceBasis::new(set.get(0).clone(), 0.0).unwrap();
        let w2 = SubspaceBasis::new(set.get(1).clone(), 0.0).unwrap();
        let e13 = SubspaceBasis::coordinate(&[0, 2], 3).unwrap();
        let e23 = SubspaceBasis::coordinate(&[1, 2], 3).unwrap();
        assert!(subspace_distance(&w1, &e13).unwrap() < 1e-12);
        assert!(subspace_distance(&w2, &e23).unwrap() < 1e-12);
    }
}
