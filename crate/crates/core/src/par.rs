//! Ordered data-parallel map over task indices.
//!
//! With the `parallel` feature the work is spread over a rayon pool;
//! without it everything runs on the calling thread. Results always come
//! back in index order, so any reduction done by the caller is
//! deterministic regardless of scheduling.

/// Environment variable capping the worker count.
pub const THREADS_ENV: &str = "QGEOM_THREADS";

/// Maps `f` over `0..n`, in parallel when the feature is enabled.
#[cfg(feature = "parallel")]
pub fn map<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    map_sequential(n, f)
}

/// Always-sequential variant, kept for benchmarks and debugging.
pub fn map_sequential<T, F>(n: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T,
{
    (0..n).map(f).collect()
}

/// Configures the global pool from `QGEOM_THREADS`, if set.
///
/// Returns the number of worker threads in effect. Calling this more than
/// once is harmless; only the first successful configuration sticks.
pub fn init_from_env() -> usize {
    #[cfg(feature = "parallel")]
    {
        if let Some(n) = std::env::var(THREADS_ENV).ok().and_then(|s| s.trim().parse::<usize>().ok()) {
            if n > 0 {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
        }
        rayon::current_num_threads()
    }
    #[cfg(not(feature = "parallel"))]
    {
        1
    }
}
