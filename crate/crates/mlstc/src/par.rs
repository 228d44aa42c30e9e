//! Data-parallel helpers with a sequential fallback.
//!
//! Every helper here is *order-preserving*: results come back indexed the
//! same way regardless of thread count or scheduling, so floating-point
//! output is bit-identical between the `parallel` feature and the
//! sequential fallback. Reductions over columns must go through
//! [`map_chunks`] and be combined sequentially in chunk order; never fold
//! floats through an unordered parallel reduce.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Columns per accumulation chunk for covariance/Gram style reductions.
pub(crate) const COLUMN_CHUNK: usize = 4096;

/// Maps `f` over `0..len`, returning results in index order.
pub(crate) fn map_indexed<T, F>(len: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..len).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..len).map(f).collect()
    }
}

/// Splits `0..len` into fixed-size chunks and maps `f` over each range.
///
/// The chunk boundaries depend only on `len` and `chunk`, so the caller can
/// combine the returned accumulators sequentially and deterministically.
pub(crate) fn map_chunks<T, F>(len: usize, chunk: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(std::ops::Range<usize>) -> T + Sync + Send,
{
    let ranges: Vec<_> = (0..len)
        .step_by(chunk.max(1))
        .map(|start| start..(start + chunk).min(len))
        .collect();
    #[cfg(feature = "parallel")]
    {
        ranges.into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        ranges.into_iter().map(f).collect()
    }
}
