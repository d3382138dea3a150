//! Seedable pseudo-random stream used by the randomized construction.
//!
//! The generator is splitmix64. Randomized outputs record the generator name
//! and seed, and every element of a run draws from its own stream derived
//! from `(seed, element index)`, so results do not depend on evaluation
//! order or thread count.

pub const GENERATOR_NAME: &str = "splitmix64";

#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    /// Stream for the `index`-th element of a seeded run.
    pub fn for_element(seed: u64, index: u64) -> Self {
        let mut boot = SplitMix64::new(seed ^ index.wrapping_mul(0xA24B_AED4_963E_E407));
        let s = boot.next_u64();
        SplitMix64::new(s)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform draw in `0..bound` (widening-multiply reduction), one
    /// `next_u64` consumed per call.
    pub fn below(&mut self, bound: u64) -> u64 {
        debug_assert!(bound > 0);
        ((self.next_u64() as u128 * bound as u128) >> 64) as u64
    }
}
