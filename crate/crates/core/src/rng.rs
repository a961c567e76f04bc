//! The one pseudo-random generator used across the crate.
//!
//! Algorithm: xoshiro256** whose 256-bit state is filled from four successive
//! SplitMix64 outputs of the 64-bit seed. Derived draws:
//!
//! * `unit()`: `(next_u64() >> 11) * 2^-53`, uniform on `[0, 1)`.
//! * `below(n)`: rejection sampling; draws `x = next_u64()` until
//!   `x < 2^64 - (2^64 mod n)` and returns `x mod n`.
//! * `shuffle(v)`: Fisher-Yates from the last index down, swapping `v[i]` with
//!   `v[below(i + 1)]`.
//! * Sub-streams: `derive_seed(seed, k)` is the SplitMix64 output for state
//!   `seed ^ (k * 0x9E3779B97F4A7C15)`.

use rand_core::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256StarStar;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// Seeded generator with the derivations documented at module level.
#[derive(Debug, Clone)]
pub struct SeededRng {
    inner: Xoshiro256StarStar,
}

impl SeededRng {
    pub fn new(seed: u64) -> Self {
        Self {
            inner: Xoshiro256StarStar::seed_from_u64(seed),
        }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform draw on `[0, 1)` with 53 bits of precision.
    #[inline]
    pub fn unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Bernoulli draw: `true` with probability `p`.
    #[inline]
    pub fn coin(&mut self, p: f64) -> bool {
        self.unit() < p
    }

    /// Uniform integer on `0..n`. Panics when `n == 0`.
    pub fn below(&mut self, n: u64) -> u64 {
        assert!(n > 0, "below(0)");
        let zone = u64::MAX - (u64::MAX - n + 1) % n;
        loop {
            let x = self.next_u64();
            if x <= zone {
                return x % n;
            }
        }
    }

    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.below(i as u64 + 1) as usize;
            items.swap(i, j);
        }
    }
}

/// SplitMix64 finaliser.
#[inline]
pub fn splitmix64(state: u64) -> u64 {
    let mut z = state.wrapping_add(GOLDEN_GAMMA);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for the `k`-th independent sub-stream of a master seed.
#[inline]
pub fn derive_seed(seed: u64, k: u64) -> u64 {
    splitmix64(seed ^ k.wrapping_mul(GOLDEN_GAMMA))
}
