//! Per-particle random streams.
//!
//! Every particle owns a ChaCha8 stream selected by its index, keyed by the
//! run seed. ChaCha is a counter-mode generator, so stream `i` is the same
//! sequence no matter which worker advances it or in what order particles
//! are scheduled.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

#[derive(Debug, Clone)]
pub struct ParticleRng(ChaCha8Rng);

impl ParticleRng {
    pub fn new(seed: u64, index: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(index);
        Self(rng)
    }

    /// Uniform on `[0, 1)`.
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        self.0.random::<f64>()
    }

    #[inline]
    pub fn normal(&mut self) -> f64 {
        self.0.sample(StandardNormal)
    }
}
