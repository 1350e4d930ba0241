//! Portable pseudo-random streams.
//!
//! * Generator: xoshiro256** (Blackman & Vigna), 256-bit state, seeded from a
//!   single `u64` by running SplitMix64 four times.
//! * Mixing function: the SplitMix64 finalizer `mix64`.
//! * Sample substream `i` under master seed `m`:
//!   `key(m, i) = mix64(m ^ mix64(i + 0x9E3779B97F4A7C15))`.
//! * Each node draws from its own generator seeded with
//!   `mix64(key(m, i) ^ fnv1a64(node_id))`, so removing a node never shifts the
//!   draws of any other node, and dropping sample `i` never changes sample `j`.
//! * Uniform `[0, 1)` doubles use the top 53 bits: `(x >> 11) * 2^-53`.
//!
//! Only integer arithmetic is involved, so streams are bit-identical on every
//! platform.

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 output function.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// 64-bit FNV-1a.
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xCBF2_9CE4_8422_2325;
    for b in bytes {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x0000_0100_0000_01B3);
    }
    h
}

#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        mix64(self.state)
    }
}

/// xoshiro256** generator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Xoshiro256StarStar {
    s: [u64; 4],
}

impl Xoshiro256StarStar {
    pub fn from_state(s: [u64; 4]) -> Self {
        Xoshiro256StarStar { s }
    }

    pub fn seed_from_u64(seed: u64) -> Self {
        let mut sm = SplitMix64::new(seed);
        let s = [sm.next_u64(), sm.next_u64(), sm.next_u64(), sm.next_u64()];
        Xoshiro256StarStar { s }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        let s = &mut self.s;
        let result = s[1].wrapping_mul(5).rotate_left(7).wrapping_mul(9);
        let t = s[1] << 17;
        s[2] ^= s[0];
        s[3] ^= s[1];
        s[1] ^= s[2];
        s[0] ^= s[3];
        s[2] ^= t;
        s[3] = s[3].rotate_left(45);
        result
    }

    /// Uniform double in `[0, 1)`.
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

/// Position of one fully specified world in a seeded run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RngState {
    pub master_seed: u64,
    pub stream_index: u64,
}

impl RngState {
    pub fn new(master_seed: u64, stream_index: u64) -> Self {
        RngState {
            master_seed,
            stream_index,
        }
    }

    /// Substream key for this sample index.
    pub fn key(&self) -> u64 {
        mix64(self.master_seed ^ mix64(self.stream_index.wrapping_add(GOLDEN_GAMMA)))
    }

    /// Generator for the node whose id hashes to `node_hash`.
    pub fn node_generator(&self, node_hash: u64) -> Xoshiro256StarStar {
        Xoshiro256StarStar::seed_from_u64(mix64(self.key() ^ node_hash))
    }

    pub fn generator_for(&self, node_id: &str) -> Xoshiro256StarStar {
        self.node_generator(fnv1a64(node_id.as_bytes()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_core::{RngCore, SeedableRng};

    // Frozen reference vectors; cross-checked below against rand_xoshiro.
    const SPLITMIX_SEED_1234567: [u64; 5] = [
        6457827717110365317,
        3203168211198807973,
        9817491932198370423,
        4593380528125082431,
        16408922859458223821,
    ];

    #[test]
    fn splitmix_reference_vector() {
        let mut sm = SplitMix64::new(1234567);
        for want in SPLITMIX_SEED_1234567 {
            assert_eq!(sm.next_u64(), want);
        }
    }

    #[test]
    fn xoshiro_reference_vector() {
        // State [1, 2, 3, 4]: first outputs of the reference C implementation.
        let mut x = Xoshiro256StarStar::from_state([1, 2, 3, 4]);
        let want = [
            11520,
            0,
            1509978240,
            1215971899390074240,
            1216172134540287360,
            607988272756665600,
        ];
        for w in want {
            assert_eq!(x.next_u64(), w);
        }
    }

    #[test]
    fn matches_independent_implementation() {
        for seed in [0u64, 1, 42, 1234567, u64::MAX] {
            let mut ours = SplitMix64::new(seed);
            let mut theirs = rand_xoshiro::SplitMix64::seed_from_u64(seed);
            for _ in 0..64 {
                assert_eq!(ours.next_u64(), theirs.next_u64());
            }
            let mut ours = Xoshiro256StarStar::seed_from_u64(seed);
            let mut theirs = rand_xoshiro::Xoshiro256StarStar::seed_from_u64(seed);
            for _ in 0..1000 {
                assert_eq!(ours.next_u64(), theirs.next_u64());
            }
        }
    }

    #[test]
    fn fnv_reference_values() {
        assert_eq!(fnv1a64(b""), 0xCBF29CE484222325);
        assert_eq!(fnv1a64(b"a"), 0xAF63DC4C8601EC8C);
        assert_eq!(fnv1a64(b"foobar"), 0x85944171F73967E8);
    }

    #[test]
    fn unit_interval() {
        let mut x = Xoshiro256StarStar::seed_from_u64(7);
        for _ in 0..10_000 {
            let u = x.next_f64();
            assert!((0.0..1.0).contains(&u));
        }
    }

    #[test]
    fn streams_are_index_derived() {
        let a = RngState::new(99, 5).generator_for("WTI.1").next_u64();
        let b = RngState::new(99, 5).generator_for("WTI.1").next_u64();
        assert_eq!(a, b);
        assert_ne!(a, RngState::new(99, 6).generator_for("WTI.1").next_u64());
        assert_ne!(a, RngState::new(99, 5).generator_for("WTI.2").next_u64());
        assert_ne!(a, RngState::new(98, 5).generator_for("WTI.1").next_u64());
    }
}
