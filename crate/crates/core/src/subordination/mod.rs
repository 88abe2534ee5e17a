//! Lévy drivers obtained by running the bivariate Brownian motion on a
//! random clock: `xi^_t = xi_{T_t}` with `T` an independent subordinator.
//!
//! The clock is a drift `b t` plus, optionally, a gamma process with unit
//! mean rate and variance rate `kappa` (`T_t - b t ~ Gamma(t / kappa,
//! kappa)`), whose Lévy measure is `e^{-s / kappa} / (kappa s) ds`.

mod experiments;
mod levy;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::market::{check_maturity, MarketSpec};
use crate::mc::{par_chunks, Moments, SimConfig};

pub use experiments::{replication_gap_experiment, subordinated_symmetry_check};
pub use levy::{
    bivariate_triplet, characteristic_exponent, dual_ratio_levy_density, gamma_vector, levy_density, BivariateTriplet,
    GammaVector,
};

/// Jump part of the clock.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "snake_case")]
pub enum SubordinatorLaw {
    /// Gamma process with `E T_t = t` and `Var T_t = kappa t`.
    Gamma { variance_rate: f64 },
    /// No jumps: the clock is `b t`.
    Deterministic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SubordinatorSpec {
    /// Drift `b` of the clock.
    #[serde(default)]
    pub drift: f64,
    #[serde(flatten)]
    pub law: SubordinatorLaw,
}

impl SubordinatorSpec {
    /// Pure gamma clock with unit mean rate.
    pub fn gamma(kappa: f64) -> Self {
        Self {
            drift: 0.0,
            law: SubordinatorLaw::Gamma { variance_rate: kappa },
        }
    }

    /// The clock `t -> b t`.
    pub fn deterministic(b: f64) -> Self {
        Self {
            drift: b,
            law: SubordinatorLaw::Deterministic,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.drift.is_finite() && self.drift >= 0.0) {
            return Err(Error::InvalidConfig(format!("subordinator drift must be >= 0, got {}", self.drift)));
        }
        match self.law {
            SubordinatorLaw::Gamma { variance_rate } => {
                if !(variance_rate.is_finite() && variance_rate > 0.0) {
                    return Err(Error::InvalidConfig(format!(
                        "gamma variance rate must be positive, got {variance_rate}"
                    )));
                }
            }
            SubordinatorLaw::Deterministic => {
                if self.drift <= 0.0 {
                    return Err(Error::InvalidConfig("a deterministic clock needs a positive drift".into()));
                }
            }
        }
        Ok(())
    }

    pub fn kappa(&self) -> Option<f64> {
        match self.law {
            SubordinatorLaw::Gamma { variance_rate } => Some(variance_rate),
            SubordinatorLaw::Deterministic => None,
        }
    }

    /// `E T_t / t`.
    pub fn mean_rate(&self) -> f64 {
        self.drift + if self.kappa().is_some() { 1.0 } else { 0.0 }
    }

    /// Sampler of the clock increment over `dt`.
    pub(crate) fn increment(&self, dt: f64) -> Result<ClockIncrement> {
        let gamma = match self.kappa() {
            Some(k) => Some(Gamma::new(dt / k, k).map_err(|e| Error::InvalidConfig(format!("gamma clock: {e}")))?),
            None => None,
        };
        Ok(ClockIncrement {
            drift: self.drift * dt,
            gamma,
        })
    }
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct ClockIncrement {
    drift: f64,
    gamma: Option<Gamma<f64>>,
}

impl ClockIncrement {
    #[inline]
    pub fn sample(&self, rng: &mut ChaCha8Rng) -> f64 {
        self.drift + self.gamma.map_or(0.0, |g| g.sample(rng))
    }
}

/// Brownian motion with covariance `cov` and drift `drift` per unit time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BrownianDriver {
    pub cov: [[f64; 2]; 2],
    pub drift: [f64; 2],
}

impl BrownianDriver {
    /// The driver of the market, with the martingale drift `-sigma_i^2 / 2`.
    pub fn from_market(m: &MarketSpec) -> Self {
        Self {
            cov: m.covariance(),
            drift: m.martingale_drift(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let [[a, b], [c, d]] = self.cov;
        if !(a > 0.0 && d > 0.0 && b == c && a * d - b * b > 0.0 && self.drift.iter().all(|x| x.is_finite())) {
            return Err(Error::InvalidConfig("driver covariance must be symmetric positive definite".into()));
        }
        Ok(())
    }

    pub(crate) fn det(&self) -> f64 {
        self.cov[0][0] * self.cov[1][1] - self.cov[0][1] * self.cov[1][0]
    }

    pub(crate) fn inverse(&self) -> [[f64; 2]; 2] {
        let d = self.det();
        [
            [self.cov[1][1] / d, -self.cov[0][1] / d],
            [-self.cov[1][0] / d, self.cov[0][0] / d],
        ]
    }

    /// Lower Cholesky factor `(l11, l21, l22)`.
    pub(crate) fn cholesky(&self) -> (f64, f64, f64) {
        let l11 = self.cov[0][0].sqrt();
        let l21 = self.cov[1][0] / l11;
        let l22 = (self.cov[1][1] - l21 * l21).sqrt();
        (l11, l21, l22)
    }

    /// Variance rate of `xi_2 - xi_1`.
    pub fn ratio_variance(&self) -> f64 {
        self.cov[0][0] + self.cov[1][1] - 2.0 * self.cov[0][1]
    }
}

/// Exact sampler of `xi^` increments.
#[derive(Debug, Clone, Copy)]
pub(crate) struct SubordinatedStepper {
    clock: ClockIncrement,
    mu: [f64; 2],
    l: (f64, f64, f64),
}

impl SubordinatedStepper {
    pub fn new(driver: &BrownianDriver, sub: &SubordinatorSpec, dt: f64) -> Result<Self> {
        Ok(Self {
            clock: sub.increment(dt)?,
            mu: driver.drift,
            l: driver.cholesky(),
        })
    }

    /// Returns `(dT, dxi_1, dxi_2)`.
    #[inline]
    pub fn sample(&self, rng: &mut ChaCha8Rng) -> (f64, f64, f64) {
        let dt = self.clock.sample(rng);
        let h = dt.sqrt();
        let z1: f64 = rng.sample(StandardNormal);
        let z2: f64 = rng.sample(StandardNormal);
        (
            dt,
            self.mu[0] * dt + self.l.0 * h * z1,
            self.mu[1] * dt + h * (self.l.1 * z1 + self.l.2 * z2),
        )
    }
}

/// Simulated subordinated paths.
#[derive(Debug, Clone, Serialize)]
pub struct SubordinatedBatch {
    pub n_paths: usize,
    pub n_steps: usize,
    pub maturity: f64,
    /// `xi^` on the grid `0, dt, ..., T`, path after path.
    pub values: Vec<[f64; 2]>,
    /// Clock `T_T` per path.
    pub clock: Vec<f64>,
}

impl SubordinatedBatch {
    pub fn path(&self, i: usize) -> &[[f64; 2]] {
        let w = self.n_steps + 1;
        &self.values[i * w..(i + 1) * w]
    }

    pub fn terminal(&self, i: usize) -> [f64; 2] {
        self.values[(i + 1) * (self.n_steps + 1) - 1]
    }

    /// Sample mean and standard error of `e^{xi^_Ti}`, `i = 1, 2`.
    pub fn martingale_check(&self) -> [(f64, f64); 2] {
        let mut out = [(0.0, 0.0); 2];
        for (j, o) in out.iter_mut().enumerate() {
            let mut mo = Moments::default();
            (0..self.n_paths).for_each(|i| mo.push(self.terminal(i)[j].exp()));
            *o = (mo.mean, mo.std_error());
        }
        out
    }
}

/// Simulates `xi^_t = xi_{T_t}` on `cfg.n_steps` steps.
pub fn simulate_subordinated_paths(
    driver: &BrownianDriver,
    sub: &SubordinatorSpec,
    t: f64,
    cfg: &SimConfig,
) -> Result<SubordinatedBatch> {
    driver.validate()?;
    sub.validate()?;
    check_maturity(t)?;
    cfg.validate()?;
    let n = cfg.n_steps as usize;
    let stored = cfg.n_paths as u128 * (n as u128 + 1);
    if stored > crate::mc::MAX_STORED_VALUES {
        return Err(Error::BudgetExceeded {
            requested: stored,
            budget: crate::mc::MAX_STORED_VALUES,
        });
    }
    let st = SubordinatedStepper::new(driver, sub, t / n as f64)?;
    let chunks = par_chunks(cfg.seed, cfg.n_paths, |_, paths, rng| {
        let mut values = Vec::with_capacity(paths as usize * (n + 1));
        let mut clock = Vec::with_capacity(paths as usize);
        for _ in 0..paths {
            let (mut x1, mut x2, mut tt) = (0.0, 0.0, 0.0);
            values.push([0.0, 0.0]);
            for _ in 0..n {
                let (d, d1, d2) = st.sample(rng);
                tt += d;
                x1 += d1;
                x2 += d2;
                values.push([x1, x2]);
            }
            clock.push(tt);
        }
        (values, clock)
    });
    let mut values = Vec::with_capacity(stored as usize);
    let mut clock = Vec::with_capacity(cfg.n_paths as usize);
    for (v, c) in chunks {
        values.extend(v);
        clock.extend(c);
    }
    Ok(SubordinatedBatch {
        n_paths: cfg.n_paths as usize,
        n_steps: n,
        maturity: t,
        values,
        clock,
    })
}
