//! Deterministic random streams.
//!
//! [`RandomStream`] is ChaCha with 8 rounds (`rand_chacha::ChaCha8Rng`). A
//! stream is keyed by a 64-bit seed through `SeedableRng::seed_from_u64`, whose
//! PCG32 expansion is fixed by `rand_core`, so a given seed yields the same
//! sequence on every platform. [`RandomStream::derive`] selects one of the 2^64
//! independent ChaCha streams under the same key, which is how per-trial
//! streams are produced from an experiment seed.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone)]
pub struct RandomStream {
    inner: ChaCha8Rng,
}

impl RandomStream {
    pub fn new(seed: u64) -> Self {
        Self {
            inner: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// The `index`-th child stream of `seed`. Distinct indices never overlap.
    pub fn derive(seed: u64, index: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(index);
        Self { inner }
    }

    /// Splits off an independent stream keyed by the next output of this one.
    pub fn split(&mut self) -> Self {
        Self::new(self.inner.next_u64())
    }

    /// Uniform in `[0, 1)` with 53 bits of resolution.
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        (self.inner.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    #[inline]
    pub fn bit(&mut self) -> bool {
        self.inner.next_u32() & 1 == 1
    }

    #[inline]
    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.uniform() < p
    }

    /// Uniform integer in `0..bound`. `bound` must be nonzero.
    pub fn below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0, "empty range");
        // Lemire's multiply-shift with rejection.
        let threshold = bound.wrapping_neg() % bound;
        loop {
            let r = self.inner.next_u64();
            let wide = (r as u128) * (bound as u128);
            if (wide as u64) >= threshold {
                return (wide >> 64) as u64;
            }
        }
    }

    /// 64 independent Bernoulli(`p`) bits packed in a word.
    ///
    /// Each lane compares a lazily generated uniform binary fraction against
    /// the binary expansion of `p`, most significant digit first; a lane is
    /// settled at the first digit where they differ. About half of the lanes
    /// settle per random word, so a full word costs roughly eight draws.
    pub fn bernoulli_word(&mut self, p: f64) -> u64 {
        if p.is_nan() || p <= 0.0 {
            return 0;
        }
        if p >= 1.0 {
            return u64::MAX;
        }
        let frac = (p * 18_446_744_073_709_551_616.0) as u64;
        if frac == 0 {
            return 0;
        }
        let last = frac.trailing_zeros();
        let mut ones = 0u64;
        let mut undecided = u64::MAX;
        let mut digit = 63u32;
        loop {
            let r = self.inner.next_u64();
            let pmask = if (frac >> digit) & 1 == 1 {
                u64::MAX
            } else {
                0
            };
            ones |= undecided & pmask & !r;
            undecided &= !(r ^ pmask);
            // Lanes still tied once p's expansion ends are >= p.
            if undecided == 0 || digit == last {
                return ones;
            }
            digit -= 1;
        }
    }
}

impl RngCore for RandomStream {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.inner.fill_bytes(dst)
    }
}
