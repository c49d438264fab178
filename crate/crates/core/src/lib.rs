//! Decoupled detection for the multi-user massive-MIMO uplink.
//!
//! The crate computes per-user *decouplers*: matrices `W_i` whose rows span
//! the common left nullspace of every other user's channel, so that
//! `W_i * y` carries only user `i`'s stream. Three constructions are provided:
//!
//! * [`decouple::sequential_decoupler`], a binary partition tree that reuses
//!   intermediate common-nullspace estimates between users,
//! * [`decouple::svd_decoupler`], one full SVD of each complementary channel,
//! * [`decouple::pinv_decoupler`], block rows of the channel pseudo-inverse.
//!
//! [`decouple::include_users`] extends an existing sequential decoupler set
//! when new users join, without rebuilding the tree.
//!
//! Around these sit the per-user detectors ([`detect`]), seeded channel
//! generators ([`channel`]) and a FLOP cost model with an optional
//! instrumentation counter ([`flops`]).
//!
//! The crate is `no_std` (with `alloc`). The default `std` feature only
//! switches the FLOP counter to thread-local storage.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod channel;
pub mod decouple;
pub mod detect;
mod error;
pub mod flops;
pub mod linalg;
mod matrix;

pub use error::{Error, Result};
pub use matrix::{ComplexMatrix, C64};
