//! Deterministic random streams.
//!
//! Every Monte Carlo work unit (a trial, a realization) draws from its own
//! ChaCha stream selected by `(master seed, unit index)`, so results never
//! depend on how units are scheduled across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Random stream of work unit `index` under `master_seed`.
pub fn stream(master_seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(index);
    rng
}
