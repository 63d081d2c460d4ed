//! Counter-based derivation of independent random streams.
//!
//! Every source of randomness in this crate is a ChaCha stream keyed by a
//! `(seed, domain, index)` triple. Deriving the stream for trial `i` never
//! requires generating trials `0..i`, so parallel workers can pick up any
//! subset of indices and still reproduce the single-threaded results
//! bit-for-bit.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Domain separators. Two streams with different domains are independent
/// even when seed and index coincide.
pub mod domain {
    /// Inner codeword generation, indexed by inner message.
    pub const CODEWORD: u64 = 0x01;
    /// List table generation, indexed by inner message.
    pub const LIST: u64 = 0x02;
    /// Monte Carlo trials, indexed by trial number.
    pub const TRIAL: u64 = 0x03;
    /// Packing enumeration order shuffle.
    pub const PACKING: u64 = 0x04;
    /// Per-block-length code construction in sweeps.
    pub const SWEEP_CODE: u64 = 0x05;
    /// Per-block-length simulation in sweeps.
    pub const SWEEP_SIM: u64 = 0x06;
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Collapses a `(seed, domain, index)` triple into a single 64-bit seed.
pub fn derive_seed(seed: u64, domain: u64, index: u64) -> u64 {
    let mut state = seed;
    let a = splitmix64(&mut state);
    state ^= domain.wrapping_mul(0xA076_1D64_78BD_642F);
    let b = splitmix64(&mut state);
    state ^= index.wrapping_mul(0xE703_7ED1_A0B4_28DB);
    let c = splitmix64(&mut state);
    a ^ b.rotate_left(23) ^ c.rotate_left(47)
}

/// Returns the ChaCha stream for `(seed, domain, index)`.
///
/// ChaCha output is identical on every platform, so seeded results are
/// portable as well as reproducible.
pub fn substream(seed: u64, domain: u64, index: u64) -> ChaCha8Rng {
    let mut state = derive_seed(seed, domain, index);
    let mut key = [0u8; 32];
    for chunk in key.chunks_exact_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
    }
    ChaCha8Rng::from_seed(key)
}
