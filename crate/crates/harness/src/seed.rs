//! Per-attempt seeds.

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

/// One splitmix64 step: add the golden increment, then the avalanche
/// finalizer. A bijection on `u64`.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed for attempt `attempt` at entry interval `delta_seconds`.
///
/// The three inputs are folded in one at a time, each xored into the running
/// state before a splitmix64 step. Since every step is a bijection, two
/// attempts differing only in index, or only in `Δ`, never share a seed.
pub fn derive_seed(master_seed: u64, delta_seconds: f64, attempt: u64) -> u64 {
    let h = splitmix64(master_seed);
    let h = splitmix64(h ^ delta_seconds.to_bits());
    splitmix64(h ^ attempt)
}
