//! Deterministic seed derivation.
//!
//! Child seeds are produced by folding each key component into the parent
//! with the SplitMix64 finalizer (Stafford's "Mix13" constants), which has full
//! avalanche: flipping any input bit flips each output bit with probability
//! close to one half. Seeds therefore depend only on their keys, never on
//! the order in which work is scheduled.

const GOLDEN_GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

/// SplitMix64 output function.
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives a child seed from `parent` and an ordered key.
///
/// `h_0 = mix64(parent)`, `h_{i+1} = mix64(h_i ^ (k_i + (i+1)*gamma))`.
/// Salting with the position keeps `[a, b]` and `[b, a]` apart.
pub fn derive(parent: u64, key: &[u64]) -> u64 {
    key.iter().enumerate().fold(mix64(parent), |h, (i, &k)| {
        mix64(h ^ k.wrapping_add(GOLDEN_GAMMA.wrapping_mul(i as u64 + 1)))
    })
}
