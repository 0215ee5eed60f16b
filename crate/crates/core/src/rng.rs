//! Portable Gaussian noise source.
//!
//! The bit stream is xoshiro256++ seeded through SplitMix64 (the reference
//! `seed_from_u64` expansion). Uniform doubles take the top 53 bits of each
//! 64-bit output, `(u >> 11) * 2^-53`, giving values in `[0, 1)`. Normal
//! deviates come from the basic Box-Muller transform applied to consecutive
//! uniform pairs `(u1, u2)`:
//!
//! ```text
//! r  = sqrt(-2 ln(1 - u1))
//! z0 = r cos(2 pi u2)
//! z1 = r sin(2 pi u2)
//! ```
//!
//! `z0` is emitted first, then `z1`. Any implementation following these four
//! rules reproduces the same noise up to the last-ulp behaviour of the host
//! `ln`, `cos` and `sin`.

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

#[derive(Debug, Clone)]
pub struct GaussianStream {
    rng: Xoshiro256PlusPlus,
    spare: Option<f64>,
}

impl GaussianStream {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: Xoshiro256PlusPlus::seed_from_u64(seed),
            spare: None,
        }
    }

    pub fn next_uniform(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Next standard normal deviate.
    pub fn next_standard(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        let u1 = self.next_uniform();
        let u2 = self.next_uniform();
        // 1 - u1 lies in (0, 1], so the logarithm is finite.
        let r = (-2.0 * (1.0 - u1).ln()).sqrt();
        let theta = std::f64::consts::TAU * u2;
        self.spare = Some(r * theta.sin());
        r * theta.cos()
    }
}
