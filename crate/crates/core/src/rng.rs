//! xorshift64* generator.
//!
//! Parameter initialisation must be bit-identical across platforms and
//! releases, so the generator is spelled out here instead of borrowed from
//! a crate whose stream may change between versions.

/// Replaces the all-zero state, which is a fixed point of xorshift.
const ZERO_SEED_STATE: u64 = 0x9E37_79B9_7F4A_7C15;

const MULTIPLIER: u64 = 0x2545_F491_4F6C_DD1D;

#[derive(Debug, Clone)]
pub struct XorShift64Star {
    state: u64,
}

impl XorShift64Star {
    /// The state is the seed itself, except that seed 0 maps to a fixed
    /// non-zero constant.
    pub fn new(seed: u64) -> Self {
        let state = if seed == 0 { ZERO_SEED_STATE } else { seed };
        Self { state }
    }

    pub fn next_u64(&mut self) -> u64 {
        let mut x = self.state;
        x ^= x >> 12;
        x ^= x << 25;
        x ^= x >> 27;
        self.state = x;
        x.wrapping_mul(MULTIPLIER)
    }

    /// Uniform on `[0, 1)` from the top 53 bits.
    pub fn next_unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform on `[-scale, scale)`.
    pub fn next_symmetric(&mut self, scale: f64) -> f64 {
        scale * (2.0 * self.next_unit() - 1.0)
    }
}
