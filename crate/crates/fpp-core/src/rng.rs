//! Deterministic uniform random source.
//!
//! Reproducible experiments need streams that are independent of thread
//! scheduling, so the source is keyed by `(seed, stream_id)`: replicate `r` of
//! an experiment draws from its own stream and the merged results do not
//! depend on execution order.

use rand_chacha::ChaCha12Rng;
use rand_core::{RngCore, SeedableRng};

const INV_2_53: f64 = 1.0 / (1u64 << 53) as f64;

/// Counter-based uniform generator on the open interval (0,1).
///
/// Endpoints are excluded so that `ln u` is always finite. Each instance is
/// single-owner; parallelism is achieved by independent `stream_id`s, never by
/// sharing one stream.
#[derive(Debug, Clone)]
pub struct UniformSource {
    rng: ChaCha12Rng,
    seed: u64,
    stream_id: u64,
    draws: u64,
}

impl UniformSource {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut key = [0u8; 32];
        let mut s = seed;
        for chunk in key.chunks_exact_mut(8) {
            s = splitmix64(s);
            chunk.copy_from_slice(&s.to_le_bytes());
        }
        let mut rng = ChaCha12Rng::from_seed(key);
        rng.set_stream(stream_id);
        UniformSource {
            rng,
            seed,
            stream_id,
            draws: 0,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// Number of uniforms drawn so far.
    pub fn draws(&self) -> u64 {
        self.draws
    }

    /// One uniform draw, strictly inside (0,1).
    pub fn next_open01(&mut self) -> f64 {
        self.draws += 1;
        loop {
            // 53-bit mantissa grid on [0,1); reject the exact endpoint 0.
            let u = (self.rng.next_u64() >> 11) as f64 * INV_2_53;
            if u > 0.0 {
                return u;
            }
        }
    }

    /// Unbiased index in `0..n` for resampling.
    pub fn next_index(&mut self, n: usize) -> usize {
        assert!(n > 0, "next_index: empty range");
        self.draws += 1;
        let n = n as u64;
        let zone = u64::MAX - u64::MAX % n;
        loop {
            let v = self.rng.next_u64();
            if v < zone {
                return (v % n) as usize;
            }
        }
    }
}

fn splitmix64(state: u64) -> u64 {
    let mut z = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
