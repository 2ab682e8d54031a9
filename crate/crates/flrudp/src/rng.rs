//! Deterministic pseudo-random primitives.
//!
//! Everything random in this crate flows through SplitMix64 so that runs are
//! bit-reproducible across platforms and releases. Two forms are exposed:
//!
//! - [`SplitMix64`], a sequential stream (used by the pseudo-trainer);
//! - [`mix64`], the stateless finalizer, used as a keyed hash to build
//!   splittable counter-based streams (used by Bernoulli drop plans, where
//!   each draw is keyed by `(seed, link, direction, ordinal)` so that one
//!   link's drop sequence never perturbs another's).

/// SplitMix64 finalizer. Bijective; maps a key to a well-mixed 64-bit value.
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Combine a seed with a sequence of key components into one mixed value.
pub fn mix_key(seed: u64, parts: &[u64]) -> u64 {
    let mut h = mix64(seed);
    for &p in parts {
        h = mix64(h ^ p);
    }
    h
}

/// Map a mixed 64-bit value to a uniform `f64` in `[0, 1)`.
pub fn unit_f64(h: u64) -> f64 {
    (h >> 11) as f64 / (1u64 << 53) as f64
}

/// Sequential SplitMix64 stream.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e37_79b9_7f4a_7c15);
        mix64(self.state)
    }

    /// Uniform `f32` in `[-0.5, 0.5)`, on a 2^24 grid so every value is
    /// exactly representable and the mapping is platform independent.
    pub fn next_centered_f32(&mut self) -> f32 {
        let u = self.next_u64();
        ((u >> 40) as f32) / 16_777_216.0 - 0.5
    }
}
