//! Counter-based per-trial random streams.
//!
//! Each trial draws from a ChaCha8 stream keyed by `(master_seed, purpose,
//! block)` and positioned by the trial index, so results do not depend on
//! which worker runs which trial.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// What a random stream is used for; distinct purposes never share a key.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Purpose {
    Data = 1,
    TieBreak = 2,
    Randomize = 3,
}

/// Independent stream for one trial.
pub fn trial_rng(master_seed: u64, purpose: Purpose, block: u64, trial: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&master_seed.to_le_bytes());
    key[8..16].copy_from_slice(&(purpose as u64).to_le_bytes());
    key[16..24].copy_from_slice(&block.to_le_bytes());
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(trial);
    rng
}
