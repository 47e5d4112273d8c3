//! Seeded randomness. Every generator in the workbench is a ChaCha8 stream
//! seeded through `SeedableRng::seed_from_u64`, which is specified to be
//! platform independent, so seeded outputs are byte-reproducible.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type WorkbenchRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> WorkbenchRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Seed of the `index`-th independent sub-stream of `seed` (SplitMix64
/// finalizer over the pair), for work split into fixed chunks.
pub fn substream_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
