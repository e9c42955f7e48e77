//! Index-ordered parallel maps.
//!
//! Every scan in the crate goes through [`map_range`], which returns results
//! in index order regardless of scheduling; reductions are then folded
//! sequentially so that sums and argmax ties are reproducible.

/// Evaluates `f(i)` for `i in 0..n`, in parallel when the feature is enabled.
pub fn map_range<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
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

/// Whether this build evaluates scans on the rayon pool.
pub const fn is_parallel() -> bool {
    cfg!(feature = "parallel")
}
