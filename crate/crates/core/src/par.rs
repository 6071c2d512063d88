//! Order-preserving map over `0..count`, parallel when the `parallel`
//! feature is on.

#[cfg(feature = "parallel")]
pub(crate) fn map<T: Send>(count: usize, f: impl Fn(usize) -> T + Sync + Send) -> Vec<T> {
    use rayon::prelude::*;
    (0..count).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn map<T>(count: usize, f: impl Fn(usize) -> T) -> Vec<T> {
    (0..count).map(f).collect()
}

/// [`map`] on a dedicated pool of `jobs` threads; the global pool when `None`.
#[cfg(feature = "parallel")]
pub(crate) fn map_on<T: Send>(
    count: usize,
    jobs: Option<usize>,
    f: impl Fn(usize) -> T + Sync + Send,
) -> crate::Result<Vec<T>> {
    match jobs {
        None => Ok(map(count, f)),
        Some(0) => Err(crate::Error::Config("jobs must be at least 1".into())),
        Some(j) => rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build()
            .map(|pool| pool.install(|| map(count, f)))
            .map_err(|e| crate::Error::Config(format!("cannot start {j} workers: {e}"))),
    }
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn map_on<T>(count: usize, jobs: Option<usize>, f: impl Fn(usize) -> T) -> crate::Result<Vec<T>> {
    if jobs == Some(0) {
        return Err(crate::Error::Config("jobs must be at least 1".into()));
    }
    Ok(map(count, f))
}
