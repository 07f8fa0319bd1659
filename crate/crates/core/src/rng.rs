//! Hierarchical random streams.
//!
//! A stream is identified by a root seed and a path of `(label, index)`
//! pairs. The path is folded into a 256-bit ChaCha key, so every substream
//! can be regenerated on its own, in any order, on any thread, without
//! touching its siblings.

use alloc::string::String;
use alloc::vec::Vec;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn fnv1a(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xCBF2_9CE4_8422_2325u64, |h, &b| {
        (h ^ u64::from(b)).wrapping_mul(0x0000_0100_0000_01B3)
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RngStream {
    root_seed: u64,
    path: Vec<(String, u64)>,
    key: [u64; 4],
}

impl RngStream {
    pub fn new(root_seed: u64) -> Self {
        let mut key = [0u64; 4];
        for (lane, k) in key.iter_mut().enumerate() {
            *k = mix64(root_seed ^ GOLDEN.wrapping_mul(lane as u64 + 1));
        }
        Self {
            root_seed,
            path: Vec::new(),
            key,
        }
    }

    pub fn root_seed(&self) -> u64 {
        self.root_seed
    }

    pub fn path(&self) -> &[(String, u64)] {
        &self.path
    }

    /// Child stream at `self / (label, index)`.
    pub fn derive(&self, label: &str, index: u64) -> RngStream {
        let label_hash = fnv1a(label.as_bytes());
        let mut key = self.key;
        for (lane, k) in key.iter_mut().enumerate() {
            let lane = lane as u64;
            let a = mix64(label_hash.wrapping_add(lane.wrapping_mul(GOLDEN)));
            let b = mix64(index.wrapping_mul(0xD6E8_FEB8_6659_FD93) ^ lane);
            *k = mix64(*k ^ a).wrapping_add(b).rotate_left(17) ^ mix64(b ^ *k);
        }
        let mut path = self.path.clone();
        path.push((String::from(label), index));
        RngStream {
            root_seed: self.root_seed,
            path,
            key,
        }
    }

    /// A fresh generator positioned at the start of this stream.
    pub fn rng(&self) -> ChaCha8Rng {
        let mut seed = [0u8; 32];
        for (chunk, k) in seed.chunks_exact_mut(8).zip(self.key) {
            chunk.copy_from_slice(&k.to_le_bytes());
        }
        ChaCha8Rng::from_seed(seed)
    }

    /// Short identifier of the stream, stable across platforms.
    pub fn fingerprint(&self) -> u64 {
        self.key[0] ^ self.key[1].rotate_left(32)
    }
}

pub fn derive_stream(parent: &RngStream, label: &str, index: u64) -> RngStream {
    parent.derive(label, index)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec::Vec;
    use rand::Rng;

    fn uniforms(s: &RngStream, n: usize) -> Vec<f64> {
        let mut rng = s.rng();
        (0..n).map(|_| rng.random::<f64>()).collect()
    }

    fn correlation(a: &[f64], b: &[f64]) -> f64 {
        let n = a.len() as f64;
        let ma = a.iter().sum::<f64>() / n;
        let mb = b.iter().sum::<f64>() / n;
        let mut sab = 0.0;
        let mut saa = 0.0;
        let mut sbb = 0.0;
        for (x, y) in a.iter().zip(b) {
            sab += (x - ma) * (y - mb);
            saa += (x - ma) * (x - ma);
            sbb += (y - mb) * (y - mb);
        }
        sab / libm::sqrt(saa * sbb)
    }

    #[test]
    fn same_path_same_samples() {
        let root = RngStream::new(7);
        let a = uniforms(&derive_stream(&root, "drop", 3), 100);
        let b = uniforms(&derive_stream(&RngStream::new(7), "drop", 3), 100);
        assert_eq!(a, b);
    }

    #[test]
    fn sibling_indices_uncorrelated() {
        let root = RngStream::new(7);
        let a = uniforms(&root.derive("drop", 3), 10_000);
        let b = uniforms(&root.derive("drop", 4), 10_000);
        assert!(correlation(&a, &b).abs() < 0.05);
    }

    #[test]
    fn sibling_labels_uncorrelated() {
        let root = RngStream::new(7);
        let a = uniforms(&root.derive("fading", 0), 10_000);
        let b = uniforms(&root.derive("shadow", 0), 10_000);
        assert!(correlation(&a, &b).abs() < 0.05);
    }

    #[test]
    fn path_order_matters() {
        let root = RngStream::new(1);
        let ab = root.derive("a", 0).derive("b", 0);
        let ba = root.derive("b", 0).derive("a", 0);
        assert_ne!(ab.fingerprint(), ba.fingerprint());
        assert_ne!(root.derive("x", 1).fingerprint(), root.derive("x", 2).fingerprint());
        assert_ne!(RngStream::new(1).fingerprint(), RngStream::new(2).fingerprint());
        assert_eq!(ab.path().len(), 2);
        assert_eq!(ab.root_seed(), 1);
    }
}
