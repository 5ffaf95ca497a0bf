//! Seeded splittable generator used by the Monte Carlo oracle.
//!
//! SplitMix64: 64-bit state advanced by the golden-ratio increment and
//! finalized with a two-round mix. Reproducible from a 64-bit seed, and
//! shard sub-seeds derived with [`SplitMix64::derive`] are independent
//! streams, so merged shard accumulations do not depend on scheduling.

const GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

#[inline]
fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GAMMA);
        mix(self.state)
    }

    /// Uniform in the open interval (0, 1), on the dyadic grid (k + 1/2)/2^53.
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        ((self.next_u64() >> 11) as f64 + 0.5) * (1.0 / 9_007_199_254_740_992.0)
    }

    /// Deterministic sub-seed for shard `index` of a run seeded with `seed`.
    pub fn derive(seed: u64, index: u64) -> u64 {
        mix(seed.wrapping_add(index.wrapping_add(1).wrapping_mul(GAMMA)))
    }
}
