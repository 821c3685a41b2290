//! Seeded random streams. Each purpose gets its own stream derived from
//! `(seed, label)`, so adding a draw in one place never shifts another.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

pub fn derive_seed(seed: u64, label: &str) -> [u8; 32] {
    let mut h = Sha256::new();
    h.update(seed.to_le_bytes());
    h.update(label.as_bytes());
    h.finalize().into()
}

pub fn stream(seed: u64, label: &str) -> ChaCha8Rng {
    ChaCha8Rng::from_seed(derive_seed(seed, label))
}
