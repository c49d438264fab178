//! Real-FLOP cost model and the instrumentation counter.
//!
//! Every metered kernel charges the *model* cost of its call (evaluated at
//! the call's actual dimensions) instead of counting machine instructions.
//! Closed-form estimates in [`estimate`] walk the same call sequence
//! symbolically, so the two agree whenever the intermediate ranks are
//! generic.
//!
//! Complex arithmetic is counted in real FLOPs: by default an addition is 2,
//! a multiplication 6 and a division 11. Factorisation costs are the
//! Golub–Van Loan real counts scaled by 4 for complex data; all leading
//! constants are configurable.
//!
//! With the `std` feature the counter is thread-local, so concurrent
//! measurements on different threads do not interfere. Without it a single
//! global atomic counter is used.

pub mod estimate;

pub use estimate::{estimate_flops, Algorithm, FlopReport, PhaseFlops, SystemDescriptor};

/// Leading constants of the FLOP cost model.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct CostModel {
    pub complex_add: f64,
    pub complex_mul: f64,
    pub complex_div: f64,
    /// Householder QR of an `m x n` matrix (`m >= n`): `qr * n^2 (m - n/3)`.
    pub qr: f64,
    /// Applying `n` reflectors of an `m`-row factorisation to `k` columns:
    /// `reflector_apply * k (m n - n^2/2)`.
    pub reflector_apply: f64,
    /// Singular values only, square `n x n`: `svd_values * n^3`.
    pub svd_values: f64,
    /// Full SVD (`U` square, `Σ`, `V`) of `m x n`, `m >= n`:
    /// `c[0] m^2 n + c[1] m n^2 + c[2] n^3`.
    pub svd_full: [f64; 3],
    /// Thin SVD (`U_1`, `Σ`, `V`) of `m x n`, `m >= n`: `c[0] m n^2 + c[1] n^3`.
    pub svd_thin: [f64; 2],
    /// `Σ` and `V` of `m x n`, `m >= n`: `c[0] m n^2 + c[1] n^3`.
    pub svd_right: [f64; 2],
    /// Cholesky factorisation of an `n x n` Hermitian matrix: `cholesky * n^3`.
    pub cholesky: f64,
}

impl Default for CostModel {
    fn default() -> Self {
        Self {
            complex_add: 2.0,
            complex_mul: 6.0,
            complex_div: 11.0,
            qr: 8.0,
            reflector_apply: 16.0,
            svd_values: 32.0 / 3.0,
            svd_full: [16.0, 32.0, 36.0],
            svd_thin: [56.0, 32.0],
            svd_right: [16.0, 32.0],
            cholesky: 4.0 / 3.0,
        }
    }
}

impl CostModel {
    /// Rounds a model cost to an integer FLOP count.
    #[inline]
    pub fn round(cost: f64) -> u64 {
        if cost <= 0.0 {
            0
        } else {
            (cost + 0.5) as u64
        }
    }

    /// `m x n` times `n x p`: `m p (n mul + (n - 1) add)`.
    pub fn matmul(&self, m: usize, n: usize, p: usize) -> f64 {
        if m == 0 || n == 0 || p == 0 {
            return 0.0;
        }
        let (m, n, p) = (m as f64, n as f64, p as f64);
        m * p * (n * self.complex_mul + (n - 1.0) * self.complex_add)
    }

    pub fn householder_qr(&self, m: usize, n: usize) -> f64 {
        let (m, n) = (m as f64, n.min(m) as f64);
        self.qr * n * n * (m - n / 3.0)
    }

    pub fn apply_reflectors(&self, m: usize, n: usize, k: usize) -> f64 {
        let (m, n, k) = (m as f64, n.min(m) as f64, k as f64);
        self.reflector_apply * k * (m * n - n * n / 2.0)
    }

    pub fn singular_values(&self, n: usize) -> f64 {
        self.svd_values * {
            let n = n as f64;
            n * n * n
        }
    }

    pub fn full_svd(&self, m: usize, n: usize) -> f64 {
        let (m, n) = (m.max(n) as f64, m.min(n) as f64);
        let [a, b, c] = self.svd_full;
        a * m * m * n + b * m * n * n + c * n * n * n
    }

    pub fn thin_svd(&self, m: usize, n: usize) -> f64 {
        let (m, n) = (m.max(n) as f64, m.min(n) as f64);
        let [a, b] = self.svd_thin;
        a * m * n * n + b * n * n * n
    }

    pub fn right_svd(&self, m: usize, n: usize) -> f64 {
        let (m, n) = (m.max(n) as f64, m.min(n) as f64);
        let [a, b] = self.svd_right;
        a * m * n * n + b * n * n * n
    }

    pub fn cholesky(&self, n: usize) -> f64 {
        self.cholesky * {
            let n = n as f64;
            n * n * n
        }
    }

    /// Forward or backward substitution with an `n x n` triangle on `rhs`
    /// right-hand sides.
    pub fn triangular_solve(&self, n: usize, rhs: usize) -> f64 {
        let (n, rhs) = (n as f64, rhs as f64);
        rhs * (n * (n - 1.0) / 2.0 * (self.complex_mul + self.complex_add) + n * self.complex_div)
    }

    #[cfg(any(test, not(feature = "std")))]
    fn to_bits(self) -> [u64; MODEL_WORDS] {
        let f = [
            self.complex_add,
            self.complex_mul,
            self.complex_div,
            self.qr,
            self.reflector_apply,
            self.svd_values,
            self.svd_full[0],
            self.svd_full[1],
            self.svd_full[2],
            self.svd_thin[0],
            self.svd_thin[1],
            self.svd_right[0],
            self.svd_right[1],
            self.cholesky,
        ];
        f.map(f64::to_bits)
    }

    #[cfg(any(test, not(feature = "std")))]
    fn from_bits(b: [u64; MODEL_WORDS]) -> Self {
        let f = b.map(f64::from_bits);
        Self {
            complex_add: f[0],
            complex_mul: f[1],
            complex_div: f[2],
            qr: f[3],
            reflector_apply: f[4],
            svd_values: f[5],
            svd_full: [f[6], f[7], f[8]],
            svd_thin: [f[9], f[10]],
            svd_right: [f[11], f[12]],
            cholesky: f[13],
        }
    }
}

#[cfg(any(test, not(feature = "std")))]
const MODEL_WORDS: usize = 14;

/// `m x n` times `n x p` under `model`.
pub fn count_matmul(m: usize, n: usize, p: usize, model: &CostModel) -> u64 {
    CostModel::round(model.matmul(m, n, p))
}

#[cfg(feature = "std")]
mod meter {
    use super::CostModel;
    use std::cell::Cell;

    std::thread_local! {
        static ENABLED: Cell<bool> = const { Cell::new(false) };
        static COUNTER: Cell<u64> = const { Cell::new(0) };
        static MODEL: Cell<Option<CostModel>> = const { Cell::new(None) };
    }

    pub fn set_enabled(on: bool) {
        ENABLED.with(|e| e.set(on));
    }

    pub fn enabled() -> bool {
        ENABLED.with(Cell::get)
    }

    pub fn add(n: u64) {
        COUNTER.with(|c| c.set(c.get().saturating_add(n)));
    }

    pub fn read() -> u64 {
        COUNTER.with(Cell::get)
    }

    pub fn reset() {
        COUNTER.with(|c| c.set(0));
    }

    pub fn model() -> CostModel {
        MODEL.with(|m| m.get().unwrap_or_default())
    }

    pub fn set_model(model: CostModel) {
        MODEL.with(|m| m.set(Some(model)));
    }
}

#[cfg(not(feature = "std"))]
mod meter {
    use super::{CostModel, MODEL_WORDS};
    use core::sync::atomic::{AtomicBool, AtomicU64, Ordering};

    static ENABLED: AtomicBool = AtomicBool::new(false);
    static COUNTER: AtomicU64 = AtomicU64::new(0);
    static CUSTOM: AtomicBool = AtomicBool::new(false);
    static MODEL: [AtomicU64; MODEL_WORDS] = [const { AtomicU64::new(0) }; MODEL_WORDS];

    pub fn set_enabled(on: bool) {
        ENABLED.store(on, Ordering::SeqCst);
    }

    pub fn enabled() -> bool {
        ENABLED.load(Ordering::Relaxed)
    }

    pub fn add(n: u64) {
        COUNTER.fetch_add(n, Ordering::Relaxed);
    }

    pub fn read() -> u64 {
        COUNTER.load(Ordering::SeqCst)
    }

    pub fn reset() {
        COUNTER.store(0, Ordering::SeqCst);
    }

    pub fn model() -> CostModel {
        if !CUSTOM.load(Ordering::Acquire) {
            return CostModel::default();
        }
        CostModel::from_bits(core::array::from_fn(|i| MODEL[i].load(Ordering::Relaxed)))
    }

    pub fn set_model(model: CostModel) {
        for (slot, bits) in MODEL.iter().zip(model.to_bits()) {
            slot.store(bits, Ordering::Relaxed);
        }
        CUSTOM.store(true, Ordering::Release);
    }
}

/// Turns the FLOP counter on or off for the current thread (or globally
/// without `std`).
pub fn instrument(on: bool) {
    meter::set_enabled(on);
}

pub fn is_instrumented() -> bool {
    meter::enabled()
}

/// Current counter value. Monotone between resets.
pub fn read_counter() -> u64 {
    meter::read()
}

pub fn reset_counter() {
    meter::reset();
}

/// Cost model used by the counter.
pub fn cost_model() -> CostModel {
    meter::model()
}

pub fn set_cost_model(model: CostModel) {
    meter::set_model(model);
}

/// Runs `f` with the counter enabled under `model` and returns the FLOPs it
/// charged. The previous counter state is restored afterwards.
pub fn measure<T>(model: &CostModel, f: impl FnOnce() -> T) -> (T, u64) {
    let was_on = meter::enabled();
    let saved_count = meter::read();
    let saved_model = meter::model();
    meter::set_model(*model);
    meter::reset();
    meter::set_enabled(true);
    let out = f();
    let used = meter::read();
    meter::set_enabled(was_on);
    meter::reset();
    meter::add(saved_count);
    meter::set_model(saved_model);
    (out, used)
}

#[inline]
pub(crate) fn charge(cost: impl FnOnce(&CostModel) -> f64) {
    if meter::enabled() {
        let model = meter::model();
        meter::add(CostModel::round(cost(&model)));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ComplexMatrix;

    #[test]
    fn matmul_closed_form() {
        let m = CostModel::default();
        assert_eq!(count_matmul(1, 1, 1, &m), 6);
        assert_eq!(count_matmul(2, 2, 2, &m), 56);
        assert_eq!(count_matmul(0, 3, 3, &m), 0);
        assert_eq!(count_matmul(3, 0, 3, &m), 0);
    }

    #[test]
    fn counter_off_is_untouched() {
        reset_counter();
        instrument(false);
        let a = ComplexMatrix::identity(2);
        a.matmul(&a).unwrap();
        assert_eq!(read_counter(), 0);
    }

    #[test]
    fn one_small_matmul_adds_56() {
        let a = ComplexMatrix::identity(2);
        let (_, used) = measure(&CostModel::default(), || a.matmul(&a).unwrap());
        assert_eq!(used, 56);
    }

    #[test]
    fn measure_restores_state() {
        instrument(false);
        reset_counter();
        let a = ComplexMatrix::identity(3);
        let _ = measure(&CostModel::default(), || a.matmul(&a).unwrap());
        assert!(!is_instrumented());
        assert_eq!(read_counter(), 0);
    }

    #[test]
    fn custom_model_is_used() {
        let model = CostModel {
            complex_mul: 1.0,
            complex_add: 1.0,
            ..CostModel::default()
        };
        let a = ComplexMatrix::identity(2);
        let (_, used) = measure(&model, || a.matmul(&a).unwrap());
        assert_eq!(used, 2 * 2 * 3);
    }

    #[test]
    fn model_bits_round_trip() {
        let model = CostModel {
            qr: 7.5,
            svd_full: [1.0, 2.0, 3.0],
            ..CostModel::default()
        };
        assert_eq!(CostModel::from_bits(model.to_bits()), model);
    }

    #[test]
    fn costs_are_monotone() {
        let m = CostModel::default();
        for a in 1..12 {
            for b in 1..=a {
                assert!(m.householder_qr(a + 1, b) >= m.householder_qr(a, b));
                assert!(m.full_svd(a + 1, b) >= m.full_svd(a, b));
                assert!(m.thin_svd(a + 1, b) >= m.thin_svd(a, b));
                assert!(m.apply_reflectors(a + 1, b, 3) >= m.apply_reflectors(a, b, 3));
                assert!(m.householder_qr(a, b) >= 0.0);
            }
        }
    }
}
