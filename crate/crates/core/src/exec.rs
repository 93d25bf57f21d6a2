//! Order-preserving map over independent work items, data-parallel when
//! the `parallel` feature is on.

/// Number of worker threads to use when the caller does not say.
pub fn default_jobs() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

/// `items.iter().map(f)` with up to `jobs` threads. Results keep the input
/// order whatever the thread count.
#[cfg(feature = "parallel")]
pub fn par_map<T, R, F>(items: &[T], jobs: usize, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    use rayon::prelude::*;
    if jobs <= 1 || items.len() <= 1 {
        return items.iter().map(f).collect();
    }
    match rayon::ThreadPoolBuilder::new().num_threads(jobs).build() {
        Ok(pool) => pool.install(|| items.par_iter().with_max_len(1).map(&f).collect()),
        Err(_) => items.iter().map(f).collect(),
    }
}

#[cfg(not(feature = "parallel"))]
pub fn par_map<T, R, F>(items: &[T], _jobs: usize, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    items.iter().map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn keeps_order() {
        let xs: Vec<u64> = (0..200).collect();
        let one = par_map(&xs, 1, |x| x * x);
        let many = par_map(&xs, 4, |x| x * x);
        assert_eq!(one, many);
        assert_eq!(many[199], 199 * 199);
    }
}
