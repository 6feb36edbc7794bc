//! Seed derivation.
//!
//! Trial `k` of an experiment with master seed `s` runs from
//! `trial_seed(s, k) = splitmix64(s + (k + 1) * 0x9E3779B97F4A7C15)`, so any trial
//! can be replayed in isolation. Within a run, protocol choices (labels, decoy
//! selection, bases) and measurement outcomes draw from separate ChaCha8 streams
//! of the same seed; feeding both backends the same outcome tape therefore
//! leaves their choice streams in lockstep.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::statevector::{OutcomeTape, Sampler};

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn trial_seed(master: u64, trial: u64) -> u64 {
    splitmix64(master.wrapping_add(trial.wrapping_add(1).wrapping_mul(GOLDEN)))
}

fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

/// The random sources of one protocol run.
#[derive(Debug, Clone)]
pub struct RunRng {
    pub choices: ChaCha8Rng,
    pub outcomes: Sampler,
    /// Free stream for adversary-side randomness.
    pub adversary: ChaCha8Rng,
}

impl RunRng {
    pub fn from_seed(seed: u64) -> Self {
        RunRng { choices: stream(seed, 0), outcomes: Sampler::new(stream(seed, 1)), adversary: stream(seed, 2) }
    }

    pub fn with_tape(seed: u64, tape: OutcomeTape) -> Self {
        let mut r = Self::from_seed(seed);
        r.outcomes = r.outcomes.with_tape(tape);
        r
    }
}
