use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::ComplexMatrix;

/// Per-user uplink channels `H_i` (`N_R x M_i`) seen by one base station.
///
/// Only systems in which every user can be decoupled are representable:
/// the complementary stream count `M̄_i = M − M_i` must stay below `N_R`.
#[derive(Clone, Debug, PartialEq)]
pub struct SystemChannel {
    n_r: usize,
    users: Vec<ComplexMatrix>,
}

impl SystemChannel {
    pub fn new(n_r: usize, users: Vec<ComplexMatrix>) -> Result<Self> {
        if n_r == 0 {
            return Err(Error::InvalidInput("N_R must be positive".into()));
        }
        if users.is_empty() {
            return Err(Error::InvalidInput("at least one user is required".into()));
        }
        for (i, h) in users.iter().enumerate() {
            if h.rows() != n_r {
                return Err(Error::Shape(format!(
                    "user {i} channel has {} rows, expected N_R = {n_r}",
                    h.rows()
                )));
            }
            if h.cols() == 0 {
                return Err(Error::InvalidInput(format!("user {i} has no streams")));
            }
            h.ensure_finite("channel")?;
        }
        let dims: Vec<usize> = users.iter().map(ComplexMatrix::cols).collect();
        check_feasible(n_r, &dims)?;
        Ok(Self { n_r, users })
    }

    pub fn n_r(&self) -> usize {
        self.n_r
    }

    /// Number of users `K`.
    pub fn num_users(&self) -> usize {
        self.users.len()
    }

    pub fn user(&self, i: usize) -> &ComplexMatrix {
        &self.users[i]
    }

    pub fn users(&self) -> &[ComplexMatrix] {
        &self.users
    }

    /// Stream counts `M_i`.
    pub fn dims(&self) -> Vec<usize> {
        self.users.iter().map(ComplexMatrix::cols).collect()
    }

    /// Total stream count `M`.
    pub fn total_streams(&self) -> usize {
        self.users.iter().map(ComplexMatrix::cols).sum()
    }

    /// `M̄_i = M − M_i`.
    pub fn complementary_dim(&self, i: usize) -> usize {
        self.total_streams() - self.users[i].cols()
    }

    /// `H̄_i`: every channel except user `i`'s, in user order.
    pub fn complementary(&self, i: usize) -> ComplexMatrix {
        let others: Vec<&ComplexMatrix> = self
            .users
            .iter()
            .enumerate()
            .filter(|&(k, _)| k != i)
            .map(|(_, h)| h)
            .collect();
        if others.is_empty() {
            ComplexMatrix::zeros(self.n_r, 0)
        } else {
            ComplexMatrix::hstack(&others).expect("rows checked on construction")
        }
    }

    /// The stacked channel `H = [H_1 ... H_K]`.
    pub fn stacked(&self) -> ComplexMatrix {
        let all: Vec<&ComplexMatrix> = self.users.iter().collect();
        ComplexMatrix::hstack(&all).expect("rows checked on construction")
    }

    /// Column offset of user `i` inside [`Self::stacked`].
    pub fn offset(&self, i: usize) -> usize {
        self.users[..i].iter().map(ComplexMatrix::cols).sum()
    }

    /// The system with `extra` users appended.
    pub fn with_users(&self, extra: &[ComplexMatrix]) -> Result<Self> {
        let mut users = self.users.clone();
        users.extend_from_slice(extra);
        Self::new(self.n_r, users)
    }
}

/// Checks `M − M_i < N_R` for every user.
pub fn check_feasible(n_r: usize, dims: &[usize]) -> Result<()> {
    let total: usize = dims.iter().sum();
    for (user, &m) in dims.iter().enumerate() {
        let complementary = total - m;
        if complementary >= n_r {
            return Err(Error::Infeasible {
                user,
                complementary,
                n_r,
            });
        }
    }
    Ok(())
}
