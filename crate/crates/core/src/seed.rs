//! Labelled, order-independent random streams.
//!
//! A stream is keyed by `SHA-256("faultlab/v1" ‖ le64(master) ‖ for each
//! label: le64(len) ‖ bytes)` and expanded with ChaCha20. Length prefixes
//! make the label encoding injective.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use sha2::{Digest, Sha256};

const DOMAIN: &[u8] = b"faultlab/v1";

pub fn derive_seed(master: u64, labels: &[&str]) -> [u8; 32] {
    let mut h = Sha256::new();
    h.update(DOMAIN);
    h.update(master.to_le_bytes());
    for label in labels {
        h.update((label.len() as u64).to_le_bytes());
        h.update(label.as_bytes());
    }
    h.finalize().into()
}

pub fn derive_rng(master: u64, labels: &[&str]) -> ChaCha20Rng {
    ChaCha20Rng::from_seed(derive_seed(master, labels))
}
