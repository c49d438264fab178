//! Per-user detection after decoupling.

mod constellation;
mod link;
mod lmmse;
mod sic;

pub use constellation::{demodulate_symbols, modulate_bits, Constellation};
pub use link::{build_link, EffectiveLink};
pub use lmmse::{lmmse_detect, lmmse_filter, lmmse_filter_output};
pub use sic::{sic_detect, sic_detect_with, SicWorkspace};
