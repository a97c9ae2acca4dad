//! SHA-256 digests over canonical byte encodings, rendered as lowercase hex.

use sha2::{Digest, Sha256};

/// Incremental builder for a canonical byte encoding.
///
/// Integers are little-endian `u64`; strings and byte blocks are prefixed
/// with their length. A domain tag starts every encoding so that digests of
/// different kinds of state never collide by construction.
pub struct CanonicalHasher(Sha256);

impl CanonicalHasher {
    pub fn new(domain: &str) -> Self {
        let mut h = CanonicalHasher(Sha256::new());
        h.str(domain);
        h
    }

    pub fn u64(&mut self, v: u64) -> &mut Self {
        self.0.update(v.to_le_bytes());
        self
    }

    pub fn str(&mut self, s: &str) -> &mut Self {
        self.bytes(s.as_bytes())
    }

    pub fn bytes(&mut self, b: &[u8]) -> &mut Self {
        self.u64(b.len() as u64);
        self.0.update(b);
        self
    }

    pub fn finish(self) -> String {
        hex::encode(self.0.finalize())
    }
}
