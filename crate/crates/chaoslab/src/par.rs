//! Data-parallel map helpers with deterministic, thread-count-independent
//! results.
//!
//! All Monte Carlo loops in this crate follow the same discipline:
//!
//! 1. work is split into items (or fixed-size chunks) indexed `0..n`;
//! 2. each item seeds its own child [`RngStream`](crate::stream::RngStream)
//!    from its index, never from a shared mutable generator;
//! 3. results are collected into an index-ordered `Vec` and reduced
//!    sequentially.
//!
//! Under the `parallel` feature the map runs on rayon; without it the same
//! closure runs on a plain iterator. Either way the output `Vec` is
//! identical, so downstream floating-point reductions see one canonical
//! summation order.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Fixed chunk width for chunked Monte Carlo loops.
///
/// The chunk size participates in stream derivation (one child stream per
/// chunk), so it is a constant of the crate rather than a tuning knob: a
/// different width would change which RNG stream produces which sample.
pub const CHUNK: usize = 4096;

/// Map `f` over `0..n`, returning results in index order.
pub fn indexed_map<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(f).collect()
    }
}

/// Chunked map for per-sample workloads: calls `f(chunk_index, range)` for
/// each `CHUNK`-wide slice of `0..n` and concatenates the returned blocks
/// in chunk order. `f` must return exactly `range.len()` items.
pub fn chunked_map<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize, std::ops::Range<usize>) -> Vec<T> + Sync + Send,
{
    let n_chunks = n.div_ceil(CHUNK);
    let blocks = indexed_map(n_chunks, |c| {
        let lo = c * CHUNK;
        let hi = usize::min(lo + CHUNK, n);
        let block = f(c, lo..hi);
        debug_assert_eq!(block.len(), hi - lo);
        block
    });
    let mut out = Vec::with_capacity(n);
    for b in blocks {
        out.extend(b);
    }
    out
}

/// Pairwise (cascade) summation: deterministic for a fixed input order and
/// substantially more accurate than a running sum for large `n`.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 32 {
        let mut s = 0.0;
        for &x in xs {
            s += x;
        }
        return s;
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// Mean via pairwise summation. Empty input yields NaN.
pub fn mean(xs: &[f64]) -> f64 {
    pairwise_sum(xs) / xs.len() as f64
}
