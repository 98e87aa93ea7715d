//! Data-parallel helpers.
//!
//! With the `parallel` feature (default) the inner loops over parameter
//! samples, sweep targets and Kriging entries run on rayon. Without it the
//! same helpers fall back to plain sequential iteration, so the numerical
//! results are identical either way: every item is computed independently and
//! collected in input order.

/// Maps `f` over `items`, in parallel when the `parallel` feature is enabled.
pub fn map_collect<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
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

/// Fallible variant of [`map_collect`]; returns the first error encountered.
pub fn try_map_collect<T, U, E, F>(items: &[T], f: F) -> Result<Vec<U>, E>
where
    T: Sync,
    U: Send,
    E: Send,
    F: Fn(&T) -> Result<U, E> + Sync + Send,
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

/// Maps `f` over an index range, in parallel when enabled.
pub fn map_range<U, F>(n: usize, f: F) -> Vec<U>
where
    U: Send,
    F: Fn(usize) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(f).collect()
    }
}

/// Caps worker threads for rayon and faer. `n = 1` forces sequential
/// execution even when the `parallel` feature is compiled in.
pub fn configure_threads(n: usize) {
    if n == 1 {
        faer::set_global_parallelism(faer::Par::Seq);
    } else {
        faer::set_global_parallelism(faer::Par::rayon(n));
    }
    #[cfg(feature = "parallel")]
    {
        // Ignore the error if a global pool already exists.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

/// Reads the `PROMKIT_THREADS` environment variable and applies it.
pub fn configure_threads_from_env() {
    if let Ok(v) = std::env::var("PROMKIT_THREADS") {
        if let Ok(n) = v.trim().parse::<usize>() {
            if n >= 1 {
                configure_threads(n);
            }
        }
    }
}
