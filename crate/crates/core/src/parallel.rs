//! Deterministic replica fan-out.
//!
//! Replica `i` always draws from `seed.fork(i)`, so results do not depend on
//! the number of workers or on scheduling.

use crate::rng::{RngSeed, SimRng};

/// Runs `f(i, rng_i)` for `i in 0..count` and returns the results in index
/// order. `workers <= 1` runs serially on the calling thread.
pub fn run_replicas<T, F>(seed: RngSeed, count: usize, workers: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize, &mut SimRng) -> T + Sync,
{
    let one = |i: usize| {
        let mut rng = seed.fork(i as u64).rng();
        f(i, &mut rng)
    };
    #[cfg(feature = "parallel")]
    if workers > 1 {
        use rayon::prelude::*;
        match rayon::ThreadPoolBuilder::new().num_threads(workers).build() {
            Ok(pool) => return pool.install(|| (0..count).into_par_iter().map(one).collect()),
            Err(e) => log::warn!("thread pool unavailable ({e}), running serially"),
        }
    }
    #[cfg(not(feature = "parallel"))]
    let _ = workers;
    (0..count).map(one).collect()
}

/// Like [`run_replicas`] but stops at the first error.
pub fn try_run_replicas<T, E, F>(seed: RngSeed, count: usize, workers: usize, f: F) -> Result<Vec<T>, E>
where
    T: Send,
    E: Send,
    F: Fn(usize, &mut SimRng) -> Result<T, E> + Sync,
{
    run_replicas(seed, count, workers, f).into_iter().collect()
}
