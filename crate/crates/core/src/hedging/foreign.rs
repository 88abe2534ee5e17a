//! Mapping domestic hedge legs to vanillas on the ratio, traded in the
//! market of asset 1.
//!
//! A homogeneous payoff satisfies `g(S_T1, S_T2) = S_T1 g*(S~_T)`, so after
//! the change to the asset-1 numéraire each leg is a payoff on `S~_T` in
//! currency 1 and its domestic value is `s01 e^{-r1 T} E_dual[g*(S~_T)]`.

use super::{foreign_quadrature, HedgeLeg, HedgePortfolio, LegPayoff};
use crate::analytic::{dual_power_call_expectation, dual_vanilla_price, VanillaKind};
use crate::error::{Error, Result};
use crate::market::DualMarketSpec;
use crate::payoff::RatioPayoff;

/// Rewrites exchange and power-exchange legs as ratio payoffs:
///
/// * `(a S1 - b S2)_+` becomes `b` puts struck at `a / b`;
/// * `(a/c S2 - b c S1)_+` (zero power weight) becomes `a / c` calls struck
///   at `b c^2 / a`;
/// * the weighted power-exchange leg becomes the power call
///   `(a - b c^2 / S~)_+ (S~ / c)^(1 + beta)`, to be replicated statically.
///
/// Legs that are already foreign pass through unchanged.
pub fn foreign_decomposition(p: &HedgePortfolio, dual: &DualMarketSpec) -> Result<HedgePortfolio> {
    let dual = DualMarketSpec::new(dual.tilde_s0, dual.tilde_sigma_sq, dual.tilde_lambda)?;
    let mut legs = Vec::with_capacity(p.legs.len());
    for leg in &p.legs {
        let g = match &leg.payoff {
            LegPayoff::Foreign(_) => {
                legs.push(leg.clone());
                continue;
            }
            LegPayoff::Domestic(g) => g,
        };
        if let Some((a, b)) = g.as_exchange() {
            if a == 0.0 {
                continue;
            }
            if b == 0.0 {
                legs.push(HedgeLeg::new(
                    LegPayoff::Foreign(RatioPayoff::bond()),
                    leg.quantity * a,
                    "bond in currency 1",
                )?);
            } else {
                legs.push(HedgeLeg::new(
                    LegPayoff::Foreign(RatioPayoff::put(a / b)?),
                    leg.quantity * b,
                    format!("puts on the ratio struck at {}", a / b),
                )?);
            }
        } else if let Some((a, b, c, beta)) = g.as_power_exchange() {
            if a == 0.0 {
                continue;
            }
            if beta == 0.0 {
                let strike = b * c * c / a;
                legs.push(HedgeLeg::new(
                    LegPayoff::Foreign(RatioPayoff::call(strike)?),
                    leg.quantity * a / c,
                    format!("calls on the ratio struck at {strike}"),
                )?);
            } else {
                if beta != dual.beta {
                    return Err(Error::UnsupportedLeg(format!(
                        "power weight {beta} differs from the market exponent {}",
                        dual.beta
                    )));
                }
                legs.push(HedgeLeg::new(
                    LegPayoff::Foreign(RatioPayoff::power_call(a, b, c, beta)?),
                    leg.quantity,
                    "power call on the ratio (static replication)",
                )?);
            }
        } else {
            return Err(Error::UnsupportedLeg(format!(
                "no vanilla decomposition for {}",
                g.tag()
            )));
        }
    }
    Ok(HedgePortfolio {
        legs,
        claim: p.claim.clone(),
        barrier: p.barrier,
        regime: p.regime,
    })
}

/// Undiscounted dual-market expectation `E[f(S~_T)]` of a ratio payoff.
pub fn foreign_leg_expectation(dual: &DualMarketSpec, f: &RatioPayoff, t: f64) -> Result<f64> {
    if f.is_bond() {
        return Ok(1.0);
    }
    if f.is_forward() {
        return Ok(dual.forward(t));
    }
    // r1 = 0 and s01 = 1 turn the quote into the plain expectation.
    if let Some(k) = f.as_call() {
        return Ok(dual_vanilla_price(dual, VanillaKind::Call, k, t, 1.0, 0.0)?.foreign_value);
    }
    if let Some(k) = f.as_put() {
        return Ok(dual_vanilla_price(dual, VanillaKind::Put, k, t, 1.0, 0.0)?.foreign_value);
    }
    if let Some((a, b, c, beta)) = f.as_power_call() {
        return dual_power_call_expectation(dual, a, b, c, beta, t);
    }
    foreign_quadrature(dual, f, t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hedging::simplify_exchange_hedge;
    use crate::market::Knock;

    #[test]
    fn exchange_maps_to_puts() {
        let dual = DualMarketSpec::new(0.95, 0.07, 0.0).unwrap();
        let p = simplify_exchange_hedge(1.0, 1.0, 1.05, &dual, Knock::Out).unwrap();
        let f = foreign_decomposition(&p, &dual).unwrap();
        assert_eq!(f.legs.len(), 2);
        let put = match &f.legs[0].payoff {
            LegPayoff::Foreign(r) => r.as_put().unwrap(),
            _ => panic!("expected foreign leg"),
        };
        assert_eq!(put, 1.0);
        assert_eq!(f.legs[0].quantity, 1.0);
        let call = match &f.legs[1].payoff {
            LegPayoff::Foreign(r) => r.as_call().unwrap(),
            _ => panic!("expected foreign leg"),
        };
        assert!((call - 1.1025).abs() < 1e-15);
        assert!((f.legs[1].quantity + 1.0 / 1.05).abs() < 1e-15);
    }

    #[test]
    fn weighted_leg_maps_to_power_call() {
        let dual = DualMarketSpec::new(0.95, 0.07, 0.01).unwrap();
        let p = simplify_exchange_hedge(1.0, 1.0, 1.05, &dual, Knock::In).unwrap();
        let f = foreign_decomposition(&p, &dual).unwrap();
        let (a, b, c, beta) = match &f.legs[0].payoff {
            LegPayoff::Foreign(r) => r.as_power_call().unwrap(),
            _ => panic!("expected foreign leg"),
        };
        assert_eq!((a, b, c), (1.0, 1.0, 1.05));
        assert_eq!(beta, dual.beta);
        // pointwise, the foreign leg reproduces the domestic payoff
        for i in 0..40 {
            let x = 80.0 + i as f64;
            let y = 70.0 + 2.0 * i as f64;
            let dom = p.payoff(x, y);
            let fgn = f.payoff(x, y);
            assert!((dom - fgn).abs() < 1e-12 * dom.max(1.0), "{x} {y}: {dom} vs {fgn}");
        }
    }
}
