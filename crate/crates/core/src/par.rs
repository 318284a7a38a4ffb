//! Order-preserving data-parallel map with a sequential fallback.
//!
//! With the `parallel` feature the closures run on the rayon global pool;
//! otherwise [`map`] is the same as [`map_sequential`].

/// Apply `f` to every item, preserving order.
#[cfg(feature = "parallel")]
pub fn map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    use rayon::prelude::*;
    items.par_iter().map(f).collect()
}

/// Apply `f` to every item, preserving order.
#[cfg(not(feature = "parallel"))]
pub fn map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    map_sequential(items, f)
}

/// Sequential map, always available (used by the benches as the baseline).
pub fn map_sequential<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    F: Fn(&T) -> R,
{
    items.iter().map(f).collect()
}

/// Whether [`map`] dispatches to worker threads in this build.
pub const fn is_parallel() -> bool {
    cfg!(feature = "parallel")
}
