//! Seeded, splittable randomness. Worker `i` of a run seeded with `master`
//! draws from ChaCha8 keyed by `master` on stream `i`, so results do not
//! depend on how work is scheduled across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SimRng = ChaCha8Rng;

pub const RNG_ALGORITHM: &str = "chacha8";

pub fn master_rng(seed: u64) -> SimRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn worker_rng(master: u64, worker: u64) -> SimRng {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(worker);
    rng
}
