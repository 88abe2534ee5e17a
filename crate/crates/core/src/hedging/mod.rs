//! Semi-static hedges for barrier claims on the ratio `S2 / S1`.
//!
//! A knock-in claim `g(S_T1, S_T2) 1{ratio touched c}` is replicated by the
//! European payoff
//!
//! ```text
//! G = g(S_T1, S_T2) 1{c S_T1 <= S_T2} + (S_T2 / (c S_T1))^beta g(S_T2 / c, c S_T1) 1{c S_T1 < S_T2}
//! ```
//!
//! (inequalities reversed for a down barrier), with `beta = 2 (r2 - r1) /
//! tilde_sigma_sq`. When the ratio first reaches `c` the two sides have the
//! same value, so the hedge is switched into the claim at zero cost; if the
//! barrier is never reached `G` expires worthless. Knock-out claims are
//! hedged through in/out parity.

mod foreign;
mod replicate;

use serde::Serialize;

pub use foreign::{foreign_decomposition, foreign_leg_expectation};
pub use replicate::{log_strike_grid, static_replicate, static_replicate_with_tolerance, StaticReplication, REPLICATION_TOLERANCE};

use crate::analytic::{dual_piecewise_price, price_european};
use crate::error::{Error, Result};
use crate::market::{BarrierDirection, BarrierSpec, DualMarketSpec, Knock, MarketSpec};
use crate::payoff::{exchange_payoff, power_exchange_payoff, HomogeneousPayoff, PayoffMetadata, RatioPayoff, Region};

/// Terminal payoff of one hedge leg.
#[derive(Debug, Clone)]
pub enum LegPayoff {
    /// Payoff on `(S_T1, S_T2)` in domestic currency.
    Domestic(HomogeneousPayoff),
    /// Payoff on the ratio `S~_T`, paid in units of asset 1 (currency 1).
    Foreign(RatioPayoff),
}

impl LegPayoff {
    /// Domestic terminal value at `(S_T1, S_T2) = (x, y)`.
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        match self {
            LegPayoff::Domestic(g) => g.eval(x, y),
            LegPayoff::Foreign(f) => x * f.eval(y / x),
        }
    }
}

#[derive(Debug, Clone)]
pub struct HedgeLeg {
    pub payoff: LegPayoff,
    pub quantity: f64,
    pub description: String,
}

impl HedgeLeg {
    pub fn new(payoff: LegPayoff, quantity: f64, description: impl Into<String>) -> Result<Self> {
        if !(quantity.is_finite() && quantity != 0.0) {
            return Err(Error::InvalidConfig(format!(
                "hedge leg quantity must be finite and nonzero, got {quantity}"
            )));
        }
        Ok(Self {
            payoff,
            quantity,
            description: description.into(),
        })
    }

    pub fn is_foreign(&self) -> bool {
        matches!(self.payoff, LegPayoff::Foreign(_))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// `r1 == r2`, no power weight on the reflected leg.
    EqualCosts,
    General,
}

/// A static portfolio of European legs replicating a barrier claim.
#[derive(Debug, Clone)]
pub struct HedgePortfolio {
    pub legs: Vec<HedgeLeg>,
    pub claim: HomogeneousPayoff,
    pub barrier: BarrierSpec,
    pub regime: Regime,
}

impl HedgePortfolio {
    /// Terminal payoff of the whole portfolio at `(S_T1, S_T2)`.
    pub fn payoff(&self, x: f64, y: f64) -> f64 {
        self.legs.iter().map(|l| l.quantity * l.payoff.eval(x, y)).sum()
    }

    /// Analytic value of every leg at time 0 with maturity `t`.
    pub fn leg_values(&self, m: &MarketSpec, t: f64) -> Result<Vec<f64>> {
        let dual = m.dual()?;
        self.legs
            .iter()
            .map(|leg| {
                let unit = match &leg.payoff {
                    LegPayoff::Domestic(g) => price_european(m, g, t)?.value,
                    LegPayoff::Foreign(f) => {
                        m.s01 * (-m.r1 * t).exp() * foreign_leg_expectation(&dual, f, t)?
                    }
                };
                Ok(leg.quantity * unit)
            })
            .collect()
    }

    /// Analytic value of the portfolio.
    pub fn value(&self, m: &MarketSpec, t: f64) -> Result<f64> {
        Ok(self.leg_values(m, t)?.iter().sum())
    }

    pub fn to_json(&self) -> serde_json::Value {
        let legs: Vec<_> = self
            .legs
            .iter()
            .map(|l| match &l.payoff {
                LegPayoff::Domestic(g) => serde_json::json!({
                    "market": "domestic",
                    "payoff": g.metadata(),
                    "quantity": l.quantity,
                    "description": l.description,
                }),
                LegPayoff::Foreign(f) => serde_json::json!({
                    "market": "foreign",
                    "payoff": ratio_payoff_json(f),
                    "quantity": l.quantity,
                    "description": l.description,
                }),
            })
            .collect();
        serde_json::json!({
            "claim": self.claim.metadata(),
            "barrier": self.barrier,
            "regime": self.regime,
            "legs": legs,
        })
    }
}

pub(crate) fn ratio_payoff_json(f: &RatioPayoff) -> serde_json::Value {
    if f.is_bond() {
        serde_json::json!({"kind": "bond", "params": {}})
    } else if f.is_forward() {
        serde_json::json!({"kind": "forward", "params": {}})
    } else if let Some(k) = f.as_call() {
        serde_json::json!({"kind": "call", "params": {"strike": k}})
    } else if let Some(k) = f.as_put() {
        serde_json::json!({"kind": "put", "params": {"strike": k}})
    } else if let Some((a, b, c, beta)) = f.as_power_call() {
        serde_json::json!({
            "kind": "power_call",
            "params": {"a": a, "b": b, "c": c, "beta": beta, "static_replication": true}
        })
    } else {
        serde_json::json!({"kind": "custom", "params": {"name": f.tag()}})
    }
}

fn regime_of(dual: &DualMarketSpec) -> Regime {
    if dual.beta == 0.0 {
        Regime::EqualCosts
    } else {
        Regime::General
    }
}

/// Semi-static hedge of `g` with the given ratio barrier.
///
/// Knock-in: `[g 1{first region}, reflected g 1{second region}]`.
/// Knock-out: `[+g, -g 1{first region}, -reflected g 1{second region}]`.
pub fn build_hedge(
    g: &HomogeneousPayoff,
    barrier: &BarrierSpec,
    dual: &DualMarketSpec,
) -> Result<HedgePortfolio> {
    let dual = DualMarketSpec::new(dual.tilde_s0, dual.tilde_sigma_sq, dual.tilde_lambda)?;
    barrier.validate_against(dual.tilde_s0)?;
    let c = barrier.level;
    let (first, second) = match barrier.direction {
        BarrierDirection::Up => (Region::AtOrAbove, Region::Above),
        BarrierDirection::Down => (Region::AtOrBelow, Region::Below),
    };
    let leg1 = g.restricted(c, first);
    let leg2 = g.reflected(c, dual.beta).restricted(c, second);
    let mut legs = Vec::with_capacity(3);
    let sign = match barrier.knock {
        Knock::In => 1.0,
        Knock::Out => {
            legs.push(HedgeLeg::new(LegPayoff::Domestic(g.clone()), 1.0, "European claim")?);
            -1.0
        }
    };
    legs.push(HedgeLeg::new(
        LegPayoff::Domestic(leg1),
        sign,
        "claim restricted to the knocked region",
    )?);
    legs.push(HedgeLeg::new(
        LegPayoff::Domestic(leg2),
        sign,
        "reflected claim beyond the barrier",
    )?);
    Ok(HedgePortfolio {
        legs,
        claim: g.clone(),
        barrier: *barrier,
        regime: regime_of(&dual),
    })
}

/// Reduced hedge for up-barrier exchange options with `0 < a <= b c`.
///
/// Knock-in: one long power-exchange leg
/// `(a/c S_T2 - b c S_T1)_+ (S_T2/(c S_T1))^beta`; the first hedge leg
/// vanishes identically and the indicator on the second is implied by the
/// payoff being positive. Knock-out: long `(a S_T1 - b S_T2)_+`, short the
/// power-exchange leg.
pub fn simplify_exchange_hedge(
    a: f64,
    b: f64,
    c: f64,
    dual: &DualMarketSpec,
    knock: Knock,
) -> Result<HedgePortfolio> {
    let dual = DualMarketSpec::new(dual.tilde_s0, dual.tilde_sigma_sq, dual.tilde_lambda)?;
    let barrier = BarrierSpec {
        level: c,
        direction: BarrierDirection::Up,
        knock,
    };
    barrier.validate_against(dual.tilde_s0)?;
    let claim = exchange_payoff(a, b)?;
    if !(a > 0.0 && a <= b * c) {
        return Err(Error::UnsupportedWeights { a, b, c });
    }
    let power = power_exchange_payoff(a, b, c, dual.beta)?;
    let legs = match knock {
        Knock::In => vec![HedgeLeg::new(LegPayoff::Domestic(power), 1.0, "long power-exchange")?],
        Knock::Out => vec![
            HedgeLeg::new(LegPayoff::Domestic(claim.clone()), 1.0, "long exchange option")?,
            HedgeLeg::new(LegPayoff::Domestic(power), -1.0, "short power-exchange")?,
        ],
    };
    Ok(HedgePortfolio {
        legs,
        claim,
        barrier,
        regime: regime_of(&dual),
    })
}

/// Describes a payoff in a single line for tables.
pub fn describe_leg(leg: &HedgeLeg) -> String {
    match &leg.payoff {
        LegPayoff::Domestic(g) => match g.metadata() {
            PayoffMetadata::Exchange { a, b } => format!("({a} S1 - {b} S2)_+"),
            PayoffMetadata::PowerExchange { a, b, c, beta } => {
                format!("({a}/{c} S2 - {b}*{c} S1)_+ (S2/({c} S1))^{beta:.6}")
            }
            PayoffMetadata::Custom { name, .. } => name,
        },
        LegPayoff::Foreign(f) => format!("foreign {}", f.tag()),
    }
}

/// Value of a foreign ratio payoff by quadrature, for payoffs without a
/// closed form.
pub(crate) fn foreign_quadrature(dual: &DualMarketSpec, f: &RatioPayoff, t: f64) -> Result<f64> {
    Ok(dual_piecewise_price(dual, |u| f.eval(u), &f.kinks(), t, 1.0, 0.0)?.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::market::dual_parameters;

    fn market(r2: f64) -> MarketSpec {
        MarketSpec {
            s01: 100.0,
            s02: 95.0,
            sigma1: 0.2,
            sigma2: 0.3,
            rho: 0.5,
            r: 0.05,
            r1: 0.02,
            r2,
        }
    }

    #[test]
    fn equal_cost_hedge_has_unweighted_reflection() {
        let dual = dual_parameters(&market(0.02)).unwrap();
        let g = exchange_payoff(1.0, 1.0).unwrap();
        let p = build_hedge(&g, &BarrierSpec::up_in(1.05), &dual).unwrap();
        assert_eq!(p.regime, Regime::EqualCosts);
        assert_eq!(p.legs.len(), 2);
        // second leg: (S2/c - c S1)_+ on {c S1 < S2}
        let (x, y): (f64, f64) = (100.0, 120.0);
        let expect = (y / 1.05 - 1.05 * x).max(0.0);
        assert_eq!(p.legs[1].payoff.eval(x, y), expect);
    }

    #[test]
    fn general_hedge_carries_power_weight() {
        let dual = dual_parameters(&market(0.01)).unwrap();
        let g = exchange_payoff(1.0, 1.0).unwrap();
        let p = build_hedge(&g, &BarrierSpec::up_in(1.05), &dual).unwrap();
        assert_eq!(p.regime, Regime::General);
        let (x, y): (f64, f64) = (100.0, 125.0);
        let beta = 2.0 * (0.01 - 0.02) / 0.07;
        let expect = (y / (1.05 * x)).powf(beta) * (y / 1.05 - 1.05 * x);
        assert!((p.legs[1].payoff.eval(x, y) - expect).abs() < 1e-12);
    }

    #[test]
    fn knock_out_is_parity_portfolio() {
        let dual = dual_parameters(&market(0.01)).unwrap();
        let g = exchange_payoff(1.0, 0.9).unwrap();
        let out = build_hedge(&g, &BarrierSpec::up_out(1.05), &dual).unwrap();
        let inn = build_hedge(&g, &BarrierSpec::up_in(1.05), &dual).unwrap();
        assert_eq!(out.legs.len(), 3);
        assert_eq!(out.legs[0].quantity, 1.0);
        assert!(out.legs[1..].iter().all(|l| l.quantity == -1.0));
        for i in 0..50 {
            for j in 0..50 {
                let x = 60.0 + 2.0 * i as f64;
                let y = 50.0 + 2.5 * j as f64;
                let total = inn.payoff(x, y) + out.payoff(x, y);
                assert!((total - g.eval(x, y)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn simplified_rejects_large_a() {
        let dual = dual_parameters(&market(0.01)).unwrap();
        assert!(matches!(
            simplify_exchange_hedge(1.2, 1.0, 1.05, &dual, Knock::In),
            Err(Error::UnsupportedWeights { .. })
        ));
        assert!(matches!(
            simplify_exchange_hedge(1.0, 1.0, 0.9, &dual, Knock::In),
            Err(Error::InvalidBarrier { .. })
        ));
    }
}
