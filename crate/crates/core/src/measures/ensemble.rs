use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Master seed plus a bound on parallel workers. Results never depend on
/// `workers`: each index owns its random stream and outputs are collected in
/// index order before any reduction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ensemble {
    pub master_seed: u64,
    pub workers: usize,
}

impl Ensemble {
    pub fn new(master_seed: u64) -> Self {
        Self {
            master_seed,
            workers: std::thread::available_parallelism().map_or(1, |n| n.get()),
        }
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers.max(1);
        self
    }

    /// `(0..count).map(f)` over a pool of `workers` threads; `init` builds
    /// per-thread scratch (FFT plans etc.).
    pub fn map<T, S, I, F>(&self, count: usize, init: I, f: F) -> Result<Vec<T>>
    where
        T: Send,
        I: Fn() -> S + Sync + Send,
        F: Fn(&mut S, u64) -> Result<T> + Sync + Send,
    {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(self.workers.max(1))
            .build()
            .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
        pool.install(|| {
            (0..count as u64)
                .into_par_iter()
                .map_init(&init, |scratch, i| f(scratch, i))
                .collect()
        })
    }
}
