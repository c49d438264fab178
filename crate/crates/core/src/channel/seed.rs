use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Seed plus stream id; identical pairs reproduce identical draws.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RngSeed {
    pub seed: u64,
    pub stream: u64,
}

/// What a stream is used for; occupies the top byte of the stream id.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[repr(u8)]
pub enum StreamPurpose {
    Channel = 1,
    LargeScale = 2,
    CeError = 3,
    Noise = 4,
    Bits = 5,
}

impl RngSeed {
    pub const fn new(seed: u64, stream: u64) -> Self {
        Self { seed, stream }
    }

    /// Stream `purpose << 56 | trial << 16 | index`. `trial` keeps 40 bits
    /// and `index` 16.
    pub fn derive(seed: u64, purpose: StreamPurpose, trial: u64, index: u64) -> Self {
        let stream = ((purpose as u64) << 56) | ((trial & 0xFF_FFFF_FFFF) << 16) | (index & 0xFFFF);
        Self { seed, stream }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_distinct() {
        let a = RngSeed::derive(1, StreamPurpose::Channel, 3, 4);
        let b = RngSeed::derive(1, StreamPurpose::Noise, 3, 4);
        let c = RngSeed::derive(1, StreamPurpose::Channel, 4, 3);
        assert_ne!(a.stream, b.stream);
        assert_ne!(a.stream, c.stream);
        assert_eq!(a.stream, (1 << 56) | (3 << 16) | 4);
    }
}
