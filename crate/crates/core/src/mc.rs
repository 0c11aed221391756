//! Deterministic parallel Monte Carlo.

use rayon::prelude::*;

use crate::rng::RngStream;

/// Runs `f` once per draw index, draw `i` on stream `i` of `seed`. The output
/// order is the index order whatever the thread count.
pub fn draws<T, F>(seed: u64, n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut RngStream) -> T + Sync + Send,
{
    (0..n as u64)
        .into_par_iter()
        .map(|i| f(&mut RngStream::new(seed, i)))
        .collect()
}

/// Like [`draws`], for a fallible draw; the first error in index order wins.
pub fn try_draws<T, E, F>(seed: u64, n: usize, f: F) -> Result<Vec<T>, E>
where
    T: Send,
    E: Send,
    F: Fn(&mut RngStream) -> Result<T, E> + Sync + Send,
{
    (0..n as u64)
        .into_par_iter()
        .map(|i| f(&mut RngStream::new(seed, i)))
        .collect()
}
