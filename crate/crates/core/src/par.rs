//! Deterministic data-parallel reductions.
//!
//! Every reduction splits its index range into a fixed binary tree of
//! blocks and combines partial results pairwise. The tree depends only on
//! the range length, so the parallel build (`parallel` feature, rayon) and
//! the sequential fallback produce bit-identical results.

use std::ops::Range;

/// Leaf block size for scalar reductions.
pub const SCALAR_LEAF: usize = 64;
/// Leaf block size for matrix-valued reductions (each leaf owns an accumulator).
pub const MATRIX_LEAF: usize = 256;

#[inline]
pub fn join<A, B, RA, RB>(a: A, b: B) -> (RA, RB)
where
    A: FnOnce() -> RA + Send,
    B: FnOnce() -> RB + Send,
    RA: Send,
    RB: Send,
{
    #[cfg(feature = "parallel")]
    {
        rayon::join(a, b)
    }
    #[cfg(not(feature = "parallel"))]
    {
        (a(), b())
    }
}

/// Reduce `range` by evaluating `leaf_fn` on blocks of at most `leaf`
/// indices and merging with `combine` along a balanced binary tree.
pub fn reduce_pairwise<T, L, C>(range: Range<usize>, leaf: usize, leaf_fn: &L, combine: &C) -> T
where
    T: Send,
    L: Fn(Range<usize>) -> T + Sync,
    C: Fn(T, T) -> T + Sync,
{
    let leaf = leaf.max(1);
    if range.len() <= leaf {
        return leaf_fn(range);
    }
    let mid = range.start + range.len() / 2;
    let (lo, hi) = join(
        || reduce_pairwise(range.start..mid, leaf, leaf_fn, combine),
        || reduce_pairwise(mid..range.end, leaf, leaf_fn, combine),
    );
    combine(lo, hi)
}

/// Pairwise sum of `f(i)` for `i` in `0..len`.
pub fn sum_by<T, F>(len: usize, f: F) -> T
where
    T: Send + Copy + Default + std::ops::Add<Output = T>,
    F: Fn(usize) -> T + Sync,
{
    if len == 0 {
        return T::default();
    }
    reduce_pairwise(
        0..len,
        SCALAR_LEAF,
        &|r: Range<usize>| {
            let mut acc = T::default();
            for i in r {
                acc = acc + f(i);
            }
            acc
        },
        &|a, b| a + b,
    )
}

/// Order-preserving map.
pub fn map_collect<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}

/// Order-preserving map over an index range.
pub fn map_range<R, F>(len: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..len).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..len).map(f).collect()
    }
}
