//! Seedable, splittable random streams.
//!
//! A stream is a ChaCha8 generator keyed by a 64-bit seed. Substreams for
//! parallel work are obtained by selecting the ChaCha stream id, so the draws
//! of worker `i` depend only on `(seed, i)` and never on scheduling.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Debug)]
pub struct RngStream(ChaCha8Rng);

impl RngStream {
    pub fn new(seed: u64) -> Self {
        RngStream(ChaCha8Rng::seed_from_u64(seed))
    }

    /// The `index`-th independent substream derived from `seed`.
    pub fn substream(seed: u64, index: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(index);
        RngStream(rng)
    }

    /// A uniform draw from `(0, 1]`; never zero, so `ln` is always finite.
    #[inline]
    pub fn open_unit(&mut self) -> f64 {
        open_unit(self)
    }
}

impl RngCore for RngStream {
    #[inline]
    fn next_u32(&mut self) -> u32 {
        self.0.next_u32()
    }

    #[inline]
    fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    #[inline]
    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.0.fill_bytes(dst)
    }
}

/// Uniform on `(0, 1]`, built from the top 53 bits of a `u64`.
#[inline]
pub fn open_unit<R: RngCore + ?Sized>(rng: &mut R) -> f64 {
    const SCALE: f64 = 1.0 / (1u64 << 53) as f64;
    ((rng.next_u64() >> 11) + 1) as f64 * SCALE
}
