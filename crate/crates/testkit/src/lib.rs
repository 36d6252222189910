//! Test support: a definitional evaluator, random inputs and the
//! hospital scenario fixtures.

pub mod fixtures;
pub mod gen;
pub mod oracle;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The generator every randomized test draws from.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
