//! Deterministic seed derivation.
//!
//! Every random stream is a `ChaCha8Rng` seeded from
//! `derive_seed(root, stream, index)`, so results never depend on the order
//! in which streams are consumed.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn fnv1a(s: &str) -> u64 {
    s.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| {
        (h ^ u64::from(b)).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

pub fn derive_seed(root: u64, stream: &str, index: u64) -> u64 {
    splitmix64(splitmix64(root ^ fnv1a(stream)) ^ index.wrapping_mul(0xd1b5_4a32_d192_ed03))
}

pub fn stream_rng(root: u64, stream: &str, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(root, stream, index))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn streams_are_stable_and_distinct() {
        assert_eq!(derive_seed(7, "a", 0), derive_seed(7, "a", 0));
        assert_ne!(derive_seed(7, "a", 0), derive_seed(7, "a", 1));
        assert_ne!(derive_seed(7, "a", 0), derive_seed(7, "b", 0));
        assert_ne!(derive_seed(7, "a", 0), derive_seed(8, "a", 0));
        let x: u64 = stream_rng(1, "s", 2).gen();
        let y: u64 = stream_rng(1, "s", 2).gen();
        assert_eq!(x, y);
    }
}
