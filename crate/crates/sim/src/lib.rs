//! Monte-Carlo BER sweeps, decoupler audits and FLOP benchmarks on top of
//! `seqdec-core`, plus the `seqdec` command line.

pub mod audit;
pub mod bench;
pub mod ber;
pub mod cli;
pub mod config;
mod error;
pub mod output;
pub mod source;

pub use error::{Result, SimError};

/// Runs `f` on a pool of `threads` workers (`0`: rayon's default).
pub fn with_threads<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| SimError::Config(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}
