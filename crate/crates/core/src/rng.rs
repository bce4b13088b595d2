//! Seeded randomness and deterministic parallelism.
//!
//! One master seed spawns independent ChaCha streams, one per work item, so a
//! Monte Carlo run gives bit-identical results no matter how the items are
//! scheduled across workers. Reductions always consume items in index order.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// RNG for work item `stream` under `master_seed`. Streams never overlap.
pub fn stream_rng(master_seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(stream);
    rng
}

/// Map `f` over `0..count`, in parallel when the `parallel` feature is on.
/// The output is always in index order, so downstream reductions are
/// independent of the worker count.
#[cfg(feature = "parallel")]
pub fn indexed_map<T, F>(count: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;
    (0..count).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn indexed_map<T, F>(count: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..count).map(f).collect()
}
