//! Seeded random source shared by the matrix generators and optimizer restarts.
//!
//! The stream is SplitMix64 (state advanced by `0x9E3779B97F4A7C15`, output
//! finalized with the Stafford variant-13 mixer). A uniform double in [0, 1)
//! is `(next_u64 >> 11) * 2^-53`. Both steps are fixed here so generated
//! matrices and initial parameters are reproducible across platforms and
//! across reimplementations.

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::SplitMix64;

#[derive(Debug, Clone)]
pub struct Rng(SplitMix64);

impl Rng {
    pub fn new(seed: u64) -> Self {
        Self(SplitMix64::seed_from_u64(seed))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    /// Uniform in [0, 1).
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in [lo, hi).
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }
}
