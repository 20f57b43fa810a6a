//! Seeded random number generation for weight init, data synthesis, and
//! shuffling.
//!
//! Every stochastic choice in the crate flows through [`SeededRng`], which
//! wraps ChaCha8 so a run is fully determined by its `u64` seed across
//! platforms.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

/// Deterministic RNG stream keyed by a `u64` seed.
#[derive(Debug, Clone)]
pub struct SeededRng {
    inner: ChaCha8Rng,
}

impl SeededRng {
    pub fn new(seed: u64) -> Self {
        SeededRng {
            inner: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform in `[0, 1)` with 53 bits of precision.
    pub fn next_f64(&mut self) -> f64 {
        (self.inner.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in `[lo, hi)`.
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }

    /// Standard normal via Box-Muller. Draws two uniforms per call and keeps
    /// no cached spare, so the stream position stays easy to reason about.
    pub fn normal(&mut self) -> f64 {
        // u1 is shifted into (0, 1] so the log never sees zero.
        let u1 = ((self.inner.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64);
        let u2 = self.next_f64();
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }

    /// Uniform index in `[0, n)`. Uses a plain modulus: the bias for the
    /// `n` values used here (dataset and batch sizes) is far below 2^-40 and
    /// irrelevant next to cross-platform reproducibility.
    pub fn index(&mut self, n: usize) -> usize {
        assert!(n > 0, "index: n must be positive");
        (self.inner.next_u64() % n as u64) as usize
    }

    /// In-place Fisher-Yates shuffle.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.index(i + 1);
            items.swap(i, j);
        }
    }
}
