//! Order-preserving batch evaluation.
//!
//! With the `parallel` feature the batch is spread over the current rayon
//! pool; without it, the same call runs sequentially. Results always come
//! back in input order, so reductions over them do not depend on the worker
//! count.

/// Maps `f` over `items`, preserving order. Parallel when the `parallel`
/// feature is enabled.
#[cfg(feature = "parallel")]
pub fn map_ordered<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    use rayon::prelude::*;
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map_ordered<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    map_sequential(items, f)
}

/// Always-sequential counterpart of [`map_ordered`].
pub fn map_sequential<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    F: Fn(&T) -> R,
{
    items.iter().map(f).collect()
}

/// True when batch evaluation may use more than one thread.
pub fn is_parallel() -> bool {
    cfg!(feature = "parallel")
}
