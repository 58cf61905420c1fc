//! Deterministic parallel execution over Monte Carlo paths.
//!
//! Paths are embarrassingly parallel; results are collected into a vector
//! indexed by path and reduced sequentially afterwards, so every estimate is
//! bit-identical regardless of the worker count.

use std::sync::Arc;

/// A worker pool of fixed size. `Workers::new(1)` runs everything on the
/// calling thread.
#[derive(Clone)]
pub struct Workers {
    threads: usize,
    pool: Option<Arc<rayon::ThreadPool>>,
}

impl Workers {
    pub fn new(threads: usize) -> Self {
        let threads = threads.max(1);
        let pool = (threads > 1).then(|| {
            Arc::new(
                rayon::ThreadPoolBuilder::new()
                    .num_threads(threads)
                    .build()
                    .expect("worker pool construction"),
            )
        });
        Self { threads, pool }
    }

    pub fn threads(&self) -> usize {
        self.threads
    }

    /// Maps `f` over path indices `0..count`, returning results in index
    /// order.
    pub fn run<R: Send, F: Fn(u64) -> R + Sync>(&self, count: u64, f: F) -> Vec<R> {
        match &self.pool {
            None => (0..count).map(f).collect(),
            Some(pool) => pool.install(|| {
                use rayon::prelude::*;
                (0..count).into_par_iter().map(|i| f(i)).collect()
            }),
        }
    }
}

impl Default for Workers {
    fn default() -> Self {
        Self::new(std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn results_are_index_ordered_and_worker_independent() {
        let f = |i: u64| (i as f64 + 1.0).ln();
        let seq = Workers::new(1).run(1000, f);
        for w in [2, 4, 8] {
            let par = Workers::new(w).run(1000, f);
            assert_eq!(seq, par);
        }
    }
}
