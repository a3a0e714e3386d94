//! Keyed random streams.
//!
//! Every stochastic quantity in the simulator is drawn from a stream keyed by
//! a tuple of integers (seed, frame, x, y, sample, ...). The key is hashed
//! with SplitMix64 finalizers and seeds a PCG generator, so streams do not
//! depend on evaluation order. That keeps parallel renders and exposures
//! bitwise reproducible for any thread count.

use rand_core::RngCore;
use rand_distr::{Distribution, Poisson, StandardNormal, StandardUniform};
use rand_pcg::Pcg64Mcg;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Hash a sequence of words into a single stream key.
pub fn stream_key(words: &[u64]) -> u64 {
    let mut h = 0x6A09_E667_F3BC_C909u64;
    for &w in words {
        h = mix64(h ^ mix64(w.wrapping_add(GOLDEN)));
    }
    h
}

/// PCG stream seeded from a stream key.
#[derive(Debug, Clone)]
pub struct StreamRng {
    inner: Pcg64Mcg,
}

impl StreamRng {
    pub fn new(key: u64) -> Self {
        // Spread the key over the 128-bit state; the low bit must be odd.
        let state = (u128::from(mix64(key)) << 64) | u128::from(key) | 1;
        Self {
            inner: Pcg64Mcg::new(state),
        }
    }

    pub fn from_words(words: &[u64]) -> Self {
        Self::new(stream_key(words))
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform in [0, 1).
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        StandardUniform.sample(&mut self.inner)
    }

    /// Standard normal deviate.
    #[inline]
    pub fn normal(&mut self) -> f64 {
        StandardNormal.sample(&mut self.inner)
    }

    /// Poisson deviate; zero for a non-positive mean.
    pub fn poisson(&mut self, mean: f64) -> f64 {
        if mean <= 0.0 {
            return 0.0;
        }
        match Poisson::new(mean) {
            Ok(d) => d.sample(&mut self.inner),
            // Means beyond the sampler's range: the normal limit is exact
            // to far below one count.
            Err(_) => (mean + mean.sqrt() * self.normal()).round().max(0.0),
        }
    }
}
