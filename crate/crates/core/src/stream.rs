//! Deterministic random-stream derivation.
//!
//! One root seed per run. Every phase, pair, or recursion branch derives its
//! own child stream from the root via a splitmix64 chain, so parallel and
//! serial execution draw from identical streams.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The concrete RNG handed to every algorithm worker.
pub type Stream = ChaCha8Rng;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Hierarchical seed derivation: `child` and `named` mix a tag into the
/// state, `stream` materializes an independent RNG at the current node.
#[derive(Clone, Copy, Debug)]
pub struct RngFactory {
    state: u64,
}

impl RngFactory {
    pub fn new(root_seed: u64) -> Self {
        RngFactory {
            state: splitmix64(root_seed ^ 0x6e6f_6973_7972_616e),
        }
    }

    pub fn child(&self, tag: u64) -> Self {
        RngFactory {
            state: splitmix64(self.state ^ splitmix64(tag)),
        }
    }

    pub fn named(&self, name: &str) -> Self {
        let mut s = self.state;
        for b in name.as_bytes() {
            s = splitmix64(s ^ u64::from(*b));
        }
        RngFactory { state: s }
    }

    /// The derived seed at this node, usable as a fresh root.
    pub fn seed(&self) -> u64 {
        self.state
    }

    pub fn stream(&self) -> Stream {
        ChaCha8Rng::seed_from_u64(self.state)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::RngCore;

    #[test]
    fn derivation_is_deterministic() {
        let a = RngFactory::new(7).named("phase").child(3);
        let b = RngFactory::new(7).named("phase").child(3);
        assert_eq!(a.stream().next_u64(), b.stream().next_u64());
    }

    #[test]
    fn siblings_differ() {
        let f = RngFactory::new(7);
        assert_ne!(
            f.child(0).stream().next_u64(),
            f.child(1).stream().next_u64()
        );
        assert_ne!(
            f.named("pairing").stream().next_u64(),
            f.named("merge").stream().next_u64()
        );
    }
}
