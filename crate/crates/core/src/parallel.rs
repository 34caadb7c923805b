//! Data-parallel map with a sequential fallback.
//!
//! The heavy stages (per-node conic construction, per-generator Galois
//! actions, loop tracking) are independent item-wise, so they funnel through
//! [`par_map`]. With the `parallel` feature (default) the work is spread over
//! a rayon pool; without it the same call runs sequentially, keeping the
//! public API and results identical.

#[cfg(feature = "parallel")]
pub fn par_map<T, U, F>(items: Vec<T>, f: F) -> Vec<U>
where
    T: Send,
    U: Send,
    F: Fn(T) -> U + Send + Sync,
{
    use rayon::prelude::*;
    items.into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn par_map<T, U, F>(items: Vec<T>, f: F) -> Vec<U>
where
    T: Send,
    U: Send,
    F: Fn(T) -> U + Send + Sync,
{
    items.into_iter().map(f).collect()
}

/// Fallible variant: collects into `Result`, failing on the first error in
/// iteration order.
pub fn try_par_map<T, U, F>(items: Vec<T>, f: F) -> crate::Result<Vec<U>>
where
    T: Send,
    U: Send,
    F: Fn(T) -> crate::Result<U> + Send + Sync,
{
    let results = par_map(items, f);
    results.into_iter().collect()
}
