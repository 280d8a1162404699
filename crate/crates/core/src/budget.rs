//! Size guards for the exponential enumerators and the worker count for the
//! parallel ones.

/// Upper bounds on enumeration sizes, plus the number of worker threads.
///
/// `workers == 0` means "use rayon's global pool".
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Budget {
    /// Maximum number of transition systems a single enumeration may visit.
    pub transition_systems: u64,
    /// Maximum `k^m` for the brute-force tensor contraction.
    pub contraction: u64,
    /// Maximum number of edges for the Tutte subset expansion (`2^m` subsets).
    pub subset_edges: u32,
    /// Largest `d` for explicit enumeration of `S_d`.
    pub permutation_degree: usize,
    /// Largest `d` for explicit enumeration of the perfect matchings of `2d` points.
    pub matching_degree: usize,
    pub workers: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            transition_systems: 100_000_000,
            contraction: 10_000_000,
            subset_edges: 24,
            permutation_degree: 8,
            matching_degree: 7,
            workers: 0,
        }
    }
}

impl Budget {
    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers;
        self
    }

    /// Runs `f` inside a pool with the configured number of workers.
    pub(crate) fn install<R: Send>(&self, f: impl FnOnce() -> R + Send) -> R {
        if self.workers == 0 {
            return f();
        }
        match rayon::ThreadPoolBuilder::new()
            .num_threads(self.workers)
            .build()
        {
            Ok(pool) => pool.install(f),
            Err(_) => f(),
        }
    }
}
