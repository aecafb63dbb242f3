use loadnet_core::experiments::Executor;
use rayon::prelude::*;

/// Runs trials on a fixed-size rayon pool. Output order matches input order.
#[derive(Debug)]
pub struct Pool {
    pool: rayon::ThreadPool,
}

impl Pool {
    pub fn new(jobs: usize) -> Self {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs.max(1))
            .build()
            .expect("thread pool");
        Self { pool }
    }

    pub fn threads(&self) -> usize {
        self.pool.current_num_threads()
    }
}

impl Executor for Pool {
    fn map<T, R, F>(&self, items: Vec<T>, f: F) -> Vec<R>
    where
        T: Send,
        R: Send,
        F: Fn(T) -> R + Sync + Send,
    {
        self.pool.install(|| items.into_par_iter().map(f).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use loadnet_core::experiments::Sequential;

    #[test]
    fn pool_preserves_order() {
        let items: Vec<u64> = (0..200).collect();
        let square = |x: u64| x * x;
        assert_eq!(
            Pool::new(4).map(items.clone(), square),
            Sequential.map(items, square)
        );
    }
}
