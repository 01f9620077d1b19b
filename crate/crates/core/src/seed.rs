//! Seed derivation.
//!
//! Every random stream in the crate is keyed by a hash of integer parts rather than by
//! sequential draws from a shared generator, so adding a trial or a grid point never
//! perturbs the streams that already exist.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

/// Stream identifiers mixed into derived seeds.
pub mod stream {
    pub const SPECKLE: u64 = 0x5350_4543;
    pub const NOISE: u64 = 0x4e4f_4953;
    pub const TRIAL: u64 = 0x5452_4941;
}

/// Hash an ordered list of integers into a 64-bit seed.
pub fn derive_seed(parts: &[u64]) -> u64 {
    let mut hasher = Sha256::new();
    for p in parts {
        hasher.update(p.to_le_bytes());
    }
    let digest = hasher.finalize();
    let mut bytes = [0u8; 8];
    bytes.copy_from_slice(&digest[..8]);
    u64::from_le_bytes(bytes)
}

/// Generator for substream `index` of the stream keyed by `key`.
pub(crate) fn substream(key: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(key);
    rng.set_stream(index);
    rng
}
