//! Bivariate Black-Scholes market, its dual (ratio) market and barrier
//! descriptions.
//!
//! Prices follow `S_i(t) = S_i(0) * exp(lambda_i * t + xi_i(t))` where
//! `lambda_i = r - r_i` is the carrying cost and `xi` is a bivariate
//! Brownian motion with drift `-sigma_i^2 / 2` and covariance
//! `[[s1^2, rho s1 s2], [rho s1 s2, s2^2]]`, so that `exp(xi_i)` are
//! martingales. Rates are continuously compounded per year; all times are
//! year fractions.
//!
//! Taking asset 1 as numéraire gives the dual market, in which the ratio
//! `S2 / S1` is a one-dimensional geometric Brownian motion with variance
//! rate `tilde_sigma_sq = s1^2 + s2^2 - 2 rho s1 s2` and drift
//! `tilde_lambda = r1 - r2`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Threshold below which the ratio variance is treated as degenerate.
pub const DEGENERATE_VARIANCE: f64 = 1e-12;

/// Bivariate Black-Scholes economy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MarketSpec {
    /// Spot of asset 1.
    pub s01: f64,
    /// Spot of asset 2.
    pub s02: f64,
    pub sigma1: f64,
    pub sigma2: f64,
    pub rho: f64,
    /// Domestic risk-free rate.
    pub r: f64,
    /// Foreign rate (or dividend yield) of asset 1.
    pub r1: f64,
    /// Foreign rate (or dividend yield) of asset 2.
    pub r2: f64,
}

impl MarketSpec {
    pub fn validate(&self) -> Result<()> {
        validate_market(self)
    }

    /// Carrying cost `r - r1` of asset 1.
    pub fn lambda1(&self) -> f64 {
        self.r - self.r1
    }

    /// Carrying cost `r - r2` of asset 2.
    pub fn lambda2(&self) -> f64 {
        self.r - self.r2
    }

    pub fn forward1(&self, t: f64) -> f64 {
        self.s01 * (self.lambda1() * t).exp()
    }

    pub fn forward2(&self, t: f64) -> f64 {
        self.s02 * (self.lambda2() * t).exp()
    }

    /// Spot ratio `s02 / s01`.
    pub fn spot_ratio(&self) -> f64 {
        self.s02 / self.s01
    }

    /// Covariance matrix of the driving Brownian motion per unit time.
    pub fn covariance(&self) -> [[f64; 2]; 2] {
        let c = self.rho * self.sigma1 * self.sigma2;
        [[self.sigma1 * self.sigma1, c], [c, self.sigma2 * self.sigma2]]
    }

    /// Martingale drift `-(sigma1^2/2, sigma2^2/2)` of the driver.
    pub fn martingale_drift(&self) -> [f64; 2] {
        [-0.5 * self.sigma1 * self.sigma1, -0.5 * self.sigma2 * self.sigma2]
    }

    /// Same economy with new spots, used for valuation at an intermediate
    /// state such as a barrier hit.
    pub fn with_spots(&self, s1: f64, s2: f64) -> Self {
        Self {
            s01: s1,
            s02: s2,
            ..*self
        }
    }

    pub fn dual(&self) -> Result<DualMarketSpec> {
        dual_parameters(self)
    }
}

/// Checks every invariant of a [`MarketSpec`]; the error names the
/// offending field.
pub fn validate_market(m: &MarketSpec) -> Result<()> {
    for (field, value) in [("s01", m.s01), ("s02", m.s02)] {
        if !(value.is_finite() && value > 0.0) {
            return Err(Error::InvalidSpot { field, value });
        }
    }
    for (field, value) in [("sigma1", m.sigma1), ("sigma2", m.sigma2)] {
        if !(value.is_finite() && value > 0.0) {
            return Err(Error::InvalidVolatility { field, value });
        }
    }
    if !(m.rho.is_finite() && m.rho.abs() < 1.0) {
        return Err(Error::InvalidCorrelation { value: m.rho });
    }
    for (field, value) in [("r", m.r), ("r1", m.r1), ("r2", m.r2)] {
        if !value.is_finite() {
            return Err(Error::InvalidRate { field, value });
        }
    }
    Ok(())
}

/// Parameters of the dual market obtained with asset 1 as numéraire.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DualMarketSpec {
    /// Ratio spot `s02 / s01`.
    pub tilde_s0: f64,
    /// Variance rate of the log ratio.
    pub tilde_sigma_sq: f64,
    /// Drift `r1 - r2` of the ratio.
    pub tilde_lambda: f64,
    /// Quasi-self-duality exponent `1 - 2 tilde_lambda / tilde_sigma_sq`.
    pub alpha: f64,
    /// `alpha - 1 = 2 (r2 - r1) / tilde_sigma_sq`.
    pub beta: f64,
}

impl DualMarketSpec {
    /// Builds the dual parameters directly from ratio quantities.
    pub fn new(tilde_s0: f64, tilde_sigma_sq: f64, tilde_lambda: f64) -> Result<Self> {
        if !(tilde_sigma_sq.is_finite() && tilde_sigma_sq > DEGENERATE_VARIANCE) {
            return Err(Error::DegenerateDualVolatility {
                value: tilde_sigma_sq,
            });
        }
        let beta = -2.0 * tilde_lambda / tilde_sigma_sq;
        Ok(Self {
            tilde_s0,
            tilde_sigma_sq,
            tilde_lambda,
            alpha: 1.0 + beta,
            beta,
        })
    }

    pub fn tilde_sigma(&self) -> f64 {
        self.tilde_sigma_sq.sqrt()
    }

    /// Forward ratio `tilde_s0 * exp(tilde_lambda * t)`.
    pub fn forward(&self, t: f64) -> f64 {
        self.tilde_s0 * (self.tilde_lambda * t).exp()
    }
}

pub fn dual_parameters(m: &MarketSpec) -> Result<DualMarketSpec> {
    validate_market(m)?;
    let var = m.sigma1 * m.sigma1 + m.sigma2 * m.sigma2 - 2.0 * m.rho * m.sigma1 * m.sigma2;
    DualMarketSpec::new(m.s02 / m.s01, var, m.r1 - m.r2)
}

/// Standard normal distribution function.
///
/// Evaluated through `erfc`, which keeps full relative accuracy in the
/// lower tail.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x * std::f64::consts::FRAC_1_SQRT_2)
}

/// Standard normal density.
pub fn normal_pdf(x: f64) -> f64 {
    const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;
    INV_SQRT_2PI * (-0.5 * x * x).exp()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BarrierDirection {
    Up,
    Down,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Knock {
    In,
    Out,
}

/// Barrier on the ratio `S2 / S1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BarrierSpec {
    /// Barrier level `c` in ratio units.
    pub level: f64,
    pub direction: BarrierDirection,
    pub knock: Knock,
}

impl BarrierSpec {
    pub fn up_in(level: f64) -> Self {
        Self {
            level,
            direction: BarrierDirection::Up,
            knock: Knock::In,
        }
    }

    pub fn up_out(level: f64) -> Self {
        Self {
            level,
            direction: BarrierDirection::Up,
            knock: Knock::Out,
        }
    }

    pub fn down_in(level: f64) -> Self {
        Self {
            level,
            direction: BarrierDirection::Down,
            knock: Knock::In,
        }
    }

    pub fn down_out(level: f64) -> Self {
        Self {
            level,
            direction: BarrierDirection::Down,
            knock: Knock::Out,
        }
    }

    /// The spot ratio must lie strictly on the non-knocked side.
    pub fn validate_against(&self, spot_ratio: f64) -> Result<()> {
        if !(self.level.is_finite() && self.level > 0.0) {
            return Err(Error::InvalidBarrier {
                reason: format!("level {} must be positive and finite", self.level),
            });
        }
        let ok = match self.direction {
            BarrierDirection::Up => self.level > spot_ratio,
            BarrierDirection::Down => self.level < spot_ratio,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidBarrier {
                reason: format!(
                    "{:?} barrier at {} is not strictly beyond the spot ratio {}",
                    self.direction, self.level, spot_ratio
                ),
            })
        }
    }

    /// Whether a ratio value lies on or beyond the barrier.
    pub fn is_breached(&self, ratio: f64) -> bool {
        match self.direction {
            BarrierDirection::Up => ratio >= self.level,
            BarrierDirection::Down => ratio <= self.level,
        }
    }
}

pub(crate) fn check_maturity(t: f64) -> Result<()> {
    if t.is_finite() && t > 0.0 {
        Ok(())
    } else {
        Err(Error::NonpositiveMaturity { value: t })
    }
}

pub(crate) fn check_weight(field: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value >= 0.0 {
        Ok(())
    } else {
        Err(Error::NegativeWeight { field, value })
    }
}
