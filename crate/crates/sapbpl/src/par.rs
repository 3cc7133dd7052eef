//! Maybe-parallel iteration helpers.
//!
//! Every parallel loop in this crate maps an index range to per-index results
//! that land in disjoint slots, so the output is identical whichever backend
//! runs it and however many threads the pool has.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Maps `0..n` to a `Vec` of results, in index order.
#[cfg(feature = "parallel")]
pub(crate) fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..n).into_par_iter().map(f).collect()
}

/// Maps `0..n` to a `Vec` of results, in index order.
#[cfg(not(feature = "parallel"))]
pub(crate) fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T,
{
    (0..n).map(f).collect()
}
