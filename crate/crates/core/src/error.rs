use alloc::string::String;

/// Errors raised by the kernels, decouplers and detectors.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    /// Some user's complementary channel has at least as many columns as
    /// there are receive antennas, so its left nullspace is empty.
    #[error(
        "infeasible system: user {user} has {complementary} complementary streams but only {n_r} receive antennas"
    )]
    Infeasible {
        user: usize,
        complementary: usize,
        n_r: usize,
    },

    #[error("singular matrix: {0}")]
    Singular(String),
}

pub type Result<T> = core::result::Result<T, Error>;
