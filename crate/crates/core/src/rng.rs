//! Seeded random streams.
//!
//! Every replication draws from its own ChaCha8 stream whose 256-bit key is
//! expanded by SplitMix64 from `(master_seed, domain, index)`. Streams depend
//! only on those three numbers, so results do not depend on how replications
//! are scheduled across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Stream = ChaCha8Rng;

/// Stream domain for experiment replications.
pub const DOMAIN_REPLICATION: u64 = 0x7265_706c;
/// Stream domain for Pickands-constant estimation.
pub const DOMAIN_PICKANDS: u64 = 0x7069_636b;
/// Stream domain for ad-hoc diagnostics (sphere probes, single simulations).
pub const DOMAIN_DIAGNOSTIC: u64 = 0x6469_6167;

/// One SplitMix64 step: advances `state` and returns the mixed output.
pub fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Stream for replication `index` of an experiment seeded with `master_seed`.
pub fn stream(master_seed: u64, domain: u64, index: u64) -> Stream {
    let mut state = master_seed;
    let a = splitmix64(&mut state);
    let mut state = a ^ domain.rotate_left(17);
    let b = splitmix64(&mut state);
    let mut state = b ^ index.wrapping_mul(0xD1B5_4A32_D192_ED03);
    let mut seed = [0u8; 32];
    for chunk in seed.chunks_exact_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
    }
    ChaCha8Rng::from_seed(seed)
}
