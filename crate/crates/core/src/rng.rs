//! Seeded random streams.
//!
//! All randomness comes from ChaCha8 (`rand_chacha::ChaCha8Rng`). A stream is
//! identified by a 64-bit seed and a 64-bit stream index; independent workers
//! use the same seed with distinct stream indices, so results are
//! bit-reproducible regardless of thread scheduling or platform.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

/// Generator for `(seed, stream)`.
pub fn stream(seed: u64, stream: u64) -> Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Generator for a single seed (stream 0).
pub fn seeded(seed: u64) -> Rng {
    stream(seed, 0)
}

/// Index drawn with probability proportional to `weights`.
pub fn sample_index(weights: &[f64], rng: &mut Rng) -> usize {
    use rand::Rng as _;
    let total: f64 = weights.iter().sum();
    let mut u = rng.random::<f64>() * total;
    for (k, &w) in weights.iter().enumerate() {
        if u < w {
            return k;
        }
        u -= w;
    }
    weights.iter().rposition(|&w| w > 0.0).unwrap_or(0)
}
