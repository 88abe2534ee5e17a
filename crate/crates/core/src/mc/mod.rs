//! Monte Carlo simulation of the bivariate Black-Scholes model: path
//! generation, barrier monitoring on the ratio, pricing with standard
//! errors and hedge-replication experiments.
//!
//! Paths are split into fixed-size chunks; chunk `k` draws from the ChaCha8
//! stream `k` of the configured seed, so every estimate is bit-identical for
//! a given seed whatever the number of worker threads.

mod barrier;
mod experiment;
mod paths;
mod rng;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use barrier::{barrier_hit, bridge_crossing_probability, price_barrier_mc};
pub use experiment::{hedge_replication_experiment, margrabe_symmetry_mc, ReplicationReport, SymmetryReport};
pub use paths::{price_european_mc, simulate_paths, PathBatch, MAX_STORED_VALUES};
pub use rng::{chunk_rng, CHUNK_PATHS};

pub(crate) use experiment::{check_knockin_weights as experiment_weights, gap_report, symmetry_from_draws};
pub(crate) use rng::{par_chunks, Moments};

/// Default cap on `n_paths * n_steps`.
pub const DEFAULT_BUDGET: u128 = 20_000_000_000;

fn default_budget() -> u128 {
    DEFAULT_BUDGET
}

/// Simulation settings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    pub n_paths: u64,
    pub n_steps: u32,
    pub seed: u64,
    #[serde(default)]
    pub bridge_correction: bool,
    #[serde(default)]
    pub antithetic: bool,
    /// Upper bound on `n_paths * n_steps`.
    #[serde(default = "default_budget")]
    pub budget: u128,
}

impl SimConfig {
    pub fn new(n_paths: u64, n_steps: u32, seed: u64) -> Self {
        Self {
            n_paths,
            n_steps,
            seed,
            bridge_correction: false,
            antithetic: false,
            budget: DEFAULT_BUDGET,
        }
    }

    pub fn with_bridge(mut self, on: bool) -> Self {
        self.bridge_correction = on;
        self
    }

    pub fn with_antithetic(mut self, on: bool) -> Self {
        self.antithetic = on;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_paths == 0 {
            return Err(Error::InvalidConfig("n_paths must be at least 1".into()));
        }
        if self.n_steps == 0 {
            return Err(Error::InvalidConfig("n_steps must be at least 1".into()));
        }
        let requested = self.n_paths as u128 * self.n_steps as u128;
        if requested > self.budget {
            return Err(Error::BudgetExceeded {
                requested,
                budget: self.budget,
            });
        }
        Ok(())
    }
}

/// A Monte Carlo price.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PriceEstimate {
    pub value: f64,
    pub std_error: f64,
    pub n_paths: u64,
    /// Average (possibly fractional) hit indicator; 0 for European claims.
    pub hit_fraction: f64,
}

impl PriceEstimate {
    /// Whether `target` lies within `k` standard errors.
    pub fn within(&self, target: f64, k: f64) -> bool {
        (self.value - target).abs() <= k * self.std_error
    }
}
