//! Worker pools and order-stable reductions.
//!
//! Work is split into blocks whose boundaries depend only on the problem
//! size. Blocks run on any thread, but their partial results are combined
//! in block order, so floating-point output is independent of the worker
//! count.

use std::ops::Range;

use rayon::prelude::*;

use crate::error::{Error, Result};

/// Runs `f` on a dedicated pool with `workers` threads.
pub fn with_workers<T, F>(workers: usize, f: F) -> Result<T>
where
    T: Send,
    F: FnOnce() -> T + Send,
{
    if workers == 0 {
        return Err(Error::InvalidParameter(
            "worker count must be at least 1".into(),
        ));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::InvalidParameter(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(f))
}

pub fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

pub(crate) fn blocks(len: usize, block_size: usize) -> Vec<Range<usize>> {
    let block_size = block_size.max(1);
    (0..len)
        .step_by(block_size)
        .map(|start| start..(start + block_size).min(len))
        .collect()
}

/// Sums per-block vectors of length `width` in block order.
///
/// `fill` receives a block range and a zeroed accumulator.
pub(crate) fn ordered_block_sum<F>(len: usize, block_size: usize, width: usize, fill: F) -> Vec<f64>
where
    F: Fn(Range<usize>, &mut [f64]) + Sync,
{
    let partials: Vec<Vec<f64>> = blocks(len, block_size)
        .into_par_iter()
        .map(|range| {
            let mut acc = vec![0.0; width];
            fill(range, &mut acc);
            acc
        })
        .collect();
    let mut total = vec![0.0; width];
    for part in partials {
        for (t, p) in total.iter_mut().zip(part) {
            *t += p;
        }
    }
    total
}
