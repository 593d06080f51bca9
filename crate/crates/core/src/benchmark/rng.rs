use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256StarStar;

/// Deterministic random stream.
///
/// The generator is xoshiro256** whose 256-bit state is expanded from the
/// 64-bit seed by SplitMix64. Uniforms take the top 53 bits of one output,
/// `(x >> 11)·2⁻⁵³`. Gaussians use Box–Muller on a pair of uniforms
/// `(u₁, u₂)` drawn in that order: `r = sqrt(−2 ln(1 − u₁))`, the first
/// variate is `r·cos(2πu₂)` and the second, returned on the next call, is
/// `r·sin(2πu₂)`.
#[derive(Debug, Clone)]
pub struct SeededRng {
    inner: Xoshiro256StarStar,
    spare: Option<f64>,
}

impl SeededRng {
    pub fn new(seed: u64) -> Self {
        Self { inner: Xoshiro256StarStar::seed_from_u64(seed), spare: None }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform on `[0, 1)`.
    pub fn uniform01(&mut self) -> f64 {
        (self.inner.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Standard normal.
    pub fn gaussian(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        let u1 = 1.0 - self.uniform01();
        let u2 = self.uniform01();
        let r = (-2.0 * u1.ln()).sqrt();
        let (s, c) = (std::f64::consts::TAU * u2).sin_cos();
        self.spare = Some(r * s);
        r * c
    }
}
