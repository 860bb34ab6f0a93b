use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Shape of the simulated cluster.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClusterConfig {
    /// Number of simulated workers.
    pub k: usize,
    /// Bytes each worker may hold; 0 means unlimited (memory-resident
    /// strategies), anything else selects the spilling strategies.
    pub memory_budget: u64,
    pub seed: u64,
    /// Physical threads used to run worker tasks. `None` reads
    /// `DEPDISC_THREADS`, then falls back to the machine's parallelism.
    /// Never changes results or metered costs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
}

impl ClusterConfig {
    pub fn new(k: usize) -> Result<Self> {
        let config = ClusterConfig {
            k,
            memory_budget: 0,
            seed: 0,
            threads: None,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn with_budget(mut self, bytes: u64) -> Self {
        self.memory_budget = bytes;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_threads(mut self, threads: usize) -> Self {
        self.threads = Some(threads);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::Config("worker count k must be at least 1".into()));
        }
        if self.threads == Some(0) {
            return Err(Error::Config("thread count must be at least 1".into()));
        }
        Ok(())
    }

    /// True when a memory budget is set.
    pub fn spilling(&self) -> bool {
        self.memory_budget > 0
    }

    /// Whether `bytes` fit in one worker's memory.
    pub fn fits(&self, bytes: u64) -> bool {
        self.memory_budget == 0 || bytes <= self.memory_budget
    }

    #[cfg(feature = "parallel")]
    pub(crate) fn physical_threads(&self) -> usize {
        self.threads
            .or_else(|| {
                std::env::var("DEPDISC_THREADS")
                    .ok()
                    .and_then(|v| v.trim().parse().ok())
                    .filter(|&t: &usize| t > 0)
            })
            .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
    }
}
