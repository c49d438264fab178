use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::C64;

/// Gray-mapped square QAM with unit average energy. QPSK is 4-QAM.
///
/// Each axis carries half of the bits as a Gray-coded PAM level, so the
/// slicer works per axis by rounding.
#[derive(Clone, Debug, PartialEq)]
pub struct Constellation {
    name: String,
    order: usize,
    bits: usize,
    /// Levels per axis.
    side: usize,
    scale: f64,
    points: Vec<C64>,
}

impl Constellation {
    pub fn qpsk() -> Self {
        Self::build("qpsk", 4)
    }

    /// Square `order`-QAM, `order` a power of 4.
    pub fn qam(order: usize) -> Result<Self> {
        if order < 4 || order.count_ones() != 1 || order.trailing_zeros() % 2 != 0 {
            return Err(Error::InvalidInput(format!(
                "{order}-QAM is not square (order must be a power of 4)"
            )));
        }
        if order == 4 {
            return Ok(Self::qpsk());
        }
        Ok(Self::build(&format!("{order}qam"), order))
    }

    /// Parses `qpsk`, `16qam`, `qam16`, `64-qam`, ...
    pub fn from_name(name: &str) -> Result<Self> {
        let lower = name.to_ascii_lowercase().replace(['-', '_'], "");
        if lower == "qpsk" || lower == "4qam" || lower == "qam4" {
            return Ok(Self::qpsk());
        }
        let digits = lower.trim_start_matches("qam").trim_end_matches("qam");
        match digits.parse::<usize>() {
            Ok(order) if lower.contains("qam") => Self::qam(order),
            _ => Err(Error::InvalidInput(format!(
                "unknown constellation `{name}`"
            ))),
        }
    }

    fn build(name: &str, order: usize) -> Self {
        let bits = order.trailing_zeros() as usize;
        let side = 1usize << (bits / 2);
        let scale = (3.0 / (2.0 * (order as f64 - 1.0))).sqrt();
        let half = bits / 2;
        let points = (0..order)
            .map(|idx| {
                let wi = idx >> half;
                let wq = idx & (side - 1);
                C64::new(
                    level(gray_decode(wi), side) * scale,
                    level(gray_decode(wq), side) * scale,
                )
            })
            .collect();
        Self {
            name: name.into(),
            order,
            bits,
            side,
            scale,
            points,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn bits_per_symbol(&self) -> usize {
        self.bits
    }

    /// Point `idx`; bit `b` of the symbol (MSB first) is bit
    /// `bits − 1 − b` of `idx`.
    pub fn points(&self) -> &[C64] {
        &self.points
    }

    /// Index of the nearest point.
    pub fn slice_index(&self, z: C64) -> usize {
        let half = self.bits / 2;
        let ki = self.axis_level(z.re);
        let kq = self.axis_level(z.im);
        (gray_encode(ki) << half) | gray_encode(kq)
    }

    /// Nearest constellation point.
    pub fn slice(&self, z: C64) -> C64 {
        self.points[self.slice_index(z)]
    }

    fn axis_level(&self, x: f64) -> usize {
        let l = self.side as f64;
        let k = ((x / self.scale + l - 1.0) / 2.0).round();
        if k.is_nan() || k <= 0.0 {
            0
        } else {
            (k as usize).min(self.side - 1)
        }
    }

    /// Maps bits (each `0` or `1`, MSB first per symbol) to symbols.
    pub fn modulate(&self, bits: &[u8]) -> Result<Vec<C64>> {
        if bits.len() % self.bits != 0 {
            return Err(Error::InvalidInput(format!(
                "{} bits is not a multiple of {} bits per symbol",
                bits.len(),
                self.bits
            )));
        }
        bits.chunks(self.bits)
            .map(|chunk| {
                let mut idx = 0usize;
                for &b in chunk {
                    if b > 1 {
                        return Err(Error::InvalidInput(format!("bit value {b}")));
                    }
                    idx = (idx << 1) | b as usize;
                }
                Ok(self.points[idx])
            })
            .collect()
    }

    /// Hard decisions: slices each symbol and emits its bits.
    pub fn demodulate(&self, symbols: &[C64]) -> Vec<u8> {
        let mut out = Vec::with_capacity(symbols.len() * self.bits);
        for &z in symbols {
            let idx = self.slice_index(z);
            out.extend((0..self.bits).rev().map(|b| ((idx >> b) & 1) as u8));
        }
        out
    }
}

/// Bipolar PAM level `2k − L + 1`.
fn level(k: usize, side: usize) -> f64 {
    2.0 * k as f64 - side as f64 + 1.0
}

fn gray_encode(k: usize) -> usize {
    k ^ (k >> 1)
}

fn gray_decode(mut g: usize) -> usize {
    let mut k = g;
    while g > 1 {
        g >>= 1;
        k ^= g;
    }
    k
}

/// Maps bits to symbols.
pub fn modulate_bits(bits: &[u8], cons: &Constellation) -> Result<Vec<C64>> {
    cons.modulate(bits)
}

/// Maps symbols to the bits of their nearest points.
pub fn demodulate_symbols(symbols: &[C64], cons: &Constellation) -> Vec<u8> {
    cons.demodulate(symbols)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn gray_round_trip() {
        for k in 0..64 {
            assert_eq!(gray_decode(gray_encode(k)), k);
        }
    }

    #[test]
    fn unit_energy() {
        for order in [4, 16, 64, 256] {
            let c = Constellation::qam(order).unwrap();
            let e: f64 = c.points().iter().map(|p| p.norm_sqr()).sum::<f64>() / order as f64;
            assert!((e - 1.0).abs() < 1e-12, "{order}");
        }
    }

    #[test]
    fn qpsk_points_distinct_and_round_trip() {
        let c = Constellation::qpsk();
        let bits = vec![0, 0, 0, 1, 1, 1, 1, 0];
        let s = c.modulate(&bits).unwrap();
        for i in 0..4 {
            for j in i + 1..4 {
                assert_ne!(s[i], s[j]);
            }
        }
        assert_eq!(c.demodulate(&s), bits);
    }

    #[test]
    fn neighbours_differ_in_one_bit() {
        let c = Constellation::qam(16).unwrap();
        let d = 2.0 * (3.0f64 / 30.0).sqrt();
        for (i, p) in c.points().iter().enumerate() {
            for (j, q) in c.points().iter().enumerate() {
                if ((p - q).norm() - d).abs() < 1e-9 {
                    assert_eq!((i ^ j).count_ones(), 1);
                }
            }
        }
    }

    #[test]
    fn zeros_map_to_one_point() {
        let c = Constellation::qam(16).unwrap();
        let s = c.modulate(&[0; 16]).unwrap();
        assert!(s.iter().all(|&z| z == s[0]));
    }

    #[test]
    fn rejects_bad_input() {
        let c = Constellation::qpsk();
        assert!(c.modulate(&[0, 1, 1]).is_err());
        assert!(c.modulate(&[0, 2]).is_err());
        assert!(Constellation::qam(8).is_err());
        assert!(Constellation::qam(32).is_err());
    }

    #[test]
    fn names() {
        assert_eq!(Constellation::from_name("QPSK").unwrap().order(), 4);
        assert_eq!(Constellation::from_name("16qam").unwrap().order(), 16);
        assert_eq!(Constellation::from_name("qam-64").unwrap().order(), 64);
        assert!(Constellation::from_name("bpsk").is_err());
    }
}
