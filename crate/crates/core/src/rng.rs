//! Seeded random streams.
//!
//! Trial `i` of a batch seeded with `s` uses seed `s + i`. Within a trial the
//! process draws from ChaCha8 stream 0 of that seed and the cycle search from
//! stream 1, so changing the search never perturbs the presented rounds.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const PROCESS_STREAM: u64 = 0;
const CYCLE_STREAM: u64 = 1;

pub fn trial_seed(base: u64, trial: usize) -> u64 {
    base.wrapping_add(trial as u64)
}

pub fn process_stream(seed: u64) -> ChaCha8Rng {
    stream(seed, PROCESS_STREAM)
}

pub fn cycle_stream(seed: u64) -> ChaCha8Rng {
    stream(seed, CYCLE_STREAM)
}

fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}
