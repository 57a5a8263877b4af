/// SplitMix64 finalizer.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Independent sub-streams drawn for the same edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Lane {
    /// The Bernoulli variable `t_e` (or `omega(e)`).
    Bernoulli = 1,
    /// The positive weight `tau'_e`.
    Positive = 2,
}

/// 64 random bits for `(seed, stream, key, lane)`.
#[inline]
pub fn keyed_u64(seed: u64, stream: u64, key: u64, lane: Lane) -> u64 {
    let mut h = mix64(seed ^ 0x9e37_79b9_7f4a_7c15);
    h = mix64(h ^ stream.wrapping_mul(0xd6e8_feb8_6659_fd93));
    h = mix64(h ^ key.wrapping_mul(0xa076_1d64_78bd_642f));
    mix64(h ^ (lane as u64).wrapping_mul(0xe703_7ed1_a0b4_28db))
}

/// Uniform on `[0, 1)` with 53 random bits.
#[inline]
pub fn keyed_uniform(seed: u64, stream: u64, key: u64, lane: Lane) -> f64 {
    (keyed_u64(seed, stream, key, lane) >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Derives a stream id from a tuple of integers (e.g. outer replica, block, inner replica).
pub fn stream_id(parts: &[u64]) -> u64 {
    parts
        .iter()
        .fold(0x243f_6a88_85a3_08d3u64, |h, &p| mix64(h ^ mix64(p.wrapping_add(0x1319_8a2e_0370_7344))))
}
