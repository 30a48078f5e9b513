//! Data-parallel helpers with a sequential fallback.
//!
//! Work is cut into fixed-size chunks whose boundaries do not depend on the
//! thread count, and chunk results are merged in chunk order, so parallel and
//! sequential execution return identical values.

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

impl Execution {
    /// True when work will actually be spread across the rayon pool.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }
}

pub fn num_threads() -> usize {
    #[cfg(feature = "parallel")]
    return rayon::current_num_threads();

    #[cfg(not(feature = "parallel"))]
    return 1;
}

/// Size the global worker pool; `0` keeps the default of one worker per
/// core. Only the first call in a process takes effect, and without the
/// `parallel` feature there is nothing to size. Results never depend on the
/// pool size.
pub fn configure_threads(threads: usize) {
    #[cfg(feature = "parallel")]
    if threads > 0 {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    }
    #[cfg(not(feature = "parallel"))]
    let _ = threads;
}

/// Evaluate `f(0..len)` and return the results in index order.
pub fn map_indexed<T, F>(exec: Execution, len: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        use rayon::prelude::*;
        return (0..len).into_par_iter().map(f).collect();
    }
    let _ = exec;
    (0..len).map(f).collect()
}

/// Fold `fold(acc, i)` over `0..len` in chunks of `chunk` indices, then merge
/// the per-chunk accumulators left to right.
pub fn fold_chunks<T, I, F, M>(exec: Execution, len: u64, chunk: u64, identity: I, fold: F, merge: M) -> T
where
    T: Send,
    I: Fn() -> T + Sync + Send,
    F: Fn(T, u64) -> T + Sync + Send,
    M: Fn(T, T) -> T,
{
    let chunk = chunk.max(1);
    let n_chunks = len.div_ceil(chunk) as usize;
    let parts = map_indexed(exec, n_chunks, |c| {
        let lo = c as u64 * chunk;
        let hi = (lo + chunk).min(len);
        (lo..hi).fold(identity(), &fold)
    });
    parts.into_iter().fold(identity(), merge)
}
