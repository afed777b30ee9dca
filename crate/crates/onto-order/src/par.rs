//! Parallel/sequential iteration shims.
//!
//! With the `parallel` feature (default) these run on the current rayon pool;
//! without it they fall back to plain iterators. All helpers preserve input
//! order, so results are identical at any thread count.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

pub(crate) fn map_collect<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}

pub(crate) fn flat_map_collect<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> Vec<U> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        items.par_iter().flat_map_iter(|t| f(t).into_iter()).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().flat_map(|t| f(t).into_iter()).collect()
    }
}

pub(crate) fn flat_map_range<U, F>(n: usize, f: F) -> Vec<U>
where
    U: Send,
    F: Fn(usize) -> Vec<U> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..n).into_par_iter().flat_map_iter(|i| f(i).into_iter()).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).flat_map(|i| f(i).into_iter()).collect()
    }
}

pub(crate) fn sort<T: Ord + Send>(v: &mut [T]) {
    #[cfg(feature = "parallel")]
    {
        v.par_sort_unstable();
    }
    #[cfg(not(feature = "parallel"))]
    {
        v.sort_unstable();
    }
}
