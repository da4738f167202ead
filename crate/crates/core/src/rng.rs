//! Deterministic random streams shared by every generator in the crate.
//!
//! Everything is built on splitmix64 so that datasets can be reproduced
//! bit-for-bit from a seed by any implementation, independent of the
//! version of a third-party RNG crate. Per-record streams are derived from
//! `splitmix64(seed ^ index)`, which lets records be generated in any order
//! (or in parallel) and still come out identical.

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// One splitmix64 output step applied to `x`.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(GOLDEN_GAMMA);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// A splitmix64 stream.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    /// Stream for record `index` under `seed`.
    pub fn for_record(seed: u64, index: u64) -> Self {
        Self::new(splitmix64(seed ^ index))
    }

    pub fn next_u64(&mut self) -> u64 {
        let out = splitmix64(self.state);
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        out
    }

    /// Uniform integer in `[0, bound)` by rejection sampling. `bound` must be non-zero.
    pub fn below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0, "empty range");
        // largest multiple of bound that fits in u64 range
        let zone = u64::MAX - (u64::MAX - bound + 1) % bound;
        loop {
            let x = self.next_u64();
            if x <= zone {
                return x % bound;
            }
        }
    }

    /// Uniform integer in `[0, bound)` for bounds beyond 64 bits.
    pub fn below_u128(&mut self, bound: u128) -> u128 {
        assert!(bound > 0, "empty range");
        if let Ok(small) = u64::try_from(bound) {
            return u128::from(self.below(small));
        }
        let zone = u128::MAX - (u128::MAX - bound + 1) % bound;
        loop {
            let x = (u128::from(self.next_u64()) << 64) | u128::from(self.next_u64());
            if x <= zone {
                return x % bound;
            }
        }
    }

    /// Uniform integer in the inclusive range `[lo, hi]`.
    pub fn between(&mut self, lo: u64, hi: u64) -> u64 {
        assert!(lo <= hi);
        if lo == 0 && hi == u64::MAX {
            return self.next_u64();
        }
        lo + self.below(hi - lo + 1)
    }
}

/// A uniformly random permutation of `0..n` keyed by `splitmix64(seed ^ i)`.
///
/// Each position's key depends only on the seed and the index, so the
/// ordering is reproducible across implementations. Ties (astronomically
/// rare) fall back to index order.
pub fn keyed_permutation(seed: u64, n: usize) -> Vec<usize> {
    let mut keyed: Vec<(u64, usize)> = (0..n).map(|i| (splitmix64(seed ^ i as u64), i)).collect();
    keyed.sort_unstable();
    keyed.into_iter().map(|(_, i)| i).collect()
}
