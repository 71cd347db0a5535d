//! Data-parallel loop helpers.
//!
//! With the `parallel` feature the loops run on the rayon pool; without it they
//! run sequentially. Reductions always split the index range into the same
//! fixed-size chunks and combine the chunk results in index order, so results
//! are bit-identical across thread counts and across the two builds.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Chunk length for deterministic reductions.
pub const CHUNK: usize = 4096;

/// Evaluates `f` on `0..n` and collects the results in index order.
pub fn map_range<T, F>(n: usize, f: F) -> Vec<T>
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

/// Applies `f` to every element of `out` together with its index.
pub fn fill<T, F>(out: &mut [T], f: F)
where
    T: Send,
    F: Fn(usize, &mut T) + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        out.par_iter_mut().enumerate().for_each(|(i, v)| f(i, v));
    }
    #[cfg(not(feature = "parallel"))]
    {
        out.iter_mut().enumerate().for_each(|(i, v)| f(i, v));
    }
}

fn chunk_partials<T, F, R>(n: usize, f: F, identity: T, reduce: R) -> Vec<T>
where
    T: Send + Sync + Copy,
    F: Fn(usize) -> T + Sync + Send,
    R: Fn(T, T) -> T + Sync + Send,
{
    let chunks = n.div_ceil(CHUNK);
    map_range(chunks, |c| {
        let lo = c * CHUNK;
        let hi = (lo + CHUNK).min(n);
        (lo..hi).fold(identity, |acc, i| reduce(acc, f(i)))
    })
}

/// Deterministic sum of `f(i)` over `0..n`.
pub fn sum<F>(n: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    chunk_partials(n, f, 0.0, |a, b| a + b).into_iter().sum()
}

/// Maximum of `f(i)` over `0..n`; `f64::NEG_INFINITY` for an empty range.
/// NaN values are ignored.
pub fn max<F>(n: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    chunk_partials(n, f, f64::NEG_INFINITY, f64::max)
        .into_iter()
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Exact integer sum over `0..n`.
pub fn sum_i64<F>(n: usize, f: F) -> i64
where
    F: Fn(usize) -> i64 + Sync + Send,
{
    chunk_partials(n, f, 0i64, |a, b| a + b).into_iter().sum()
}

/// First index in `0..n` where `f` returns `Some`, with its payload.
pub fn find_first<T, F>(n: usize, f: F) -> Option<(usize, T)>
where
    T: Send,
    F: Fn(usize) -> Option<T> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..n).into_par_iter().find_map_first(|i| f(i).map(|t| (i, t)))
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).find_map(|i| f(i).map(|t| (i, t)))
    }
}
