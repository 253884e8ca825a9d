// SplitMix64 (Steele, Lea, Flood). The finalizer is a bijection on u64.

pub(crate) const GOLDEN_GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

#[inline]
pub(crate) fn finalize(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Hash of `(seed, stream, index)`; distinct indices give distinct outputs.
#[inline]
pub(crate) fn mix3(seed: u64, stream: u64, index: u64) -> u64 {
    let base = finalize(seed.wrapping_add(stream.wrapping_mul(GOLDEN_GAMMA)));
    finalize(base ^ index)
}

/// Uniform double in [0, 1) from the top 53 bits.
#[inline]
pub(crate) fn unit(x: u64) -> f64 {
    (x >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Sequential generator, used for Zobrist codes and random playouts.
#[derive(Clone, Debug)]
pub(crate) struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub(crate) fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub(crate) fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        finalize(self.state)
    }
}
