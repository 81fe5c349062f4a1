//! Data-parallel iteration with a sequential fallback.
//!
//! Scenario classification and orbit reduction are embarrassingly parallel
//! over independent scenarios. With the `parallel` feature (default) these
//! helpers fan work out over rayon; without it they degrade to plain
//! iteration with identical results, since every caller collects in input
//! order and owes its determinism to that.

/// True when the crate was built with rayon support.
pub fn is_parallel() -> bool {
    cfg!(feature = "parallel")
}

#[cfg(feature = "parallel")]
pub fn map_collect<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    use rayon::prelude::*;
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map_collect<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    F: Fn(&T) -> U,
{
    items.iter().map(f).collect()
}
