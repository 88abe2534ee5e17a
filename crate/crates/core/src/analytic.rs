//! Closed-form prices: Margrabe exchange options, power-exchange claims,
//! knock-in/knock-out exchange options with a barrier on the ratio
//! `S2 / S1`, and Black-Scholes vanillas in the dual market.
//!
//! All `d`-values are formed from sums of logarithms and clipped to
//! `[-40, 40]` before entering the normal distribution function.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::market::{
    check_maturity, check_weight, dual_parameters, normal_cdf, normal_pdf, BarrierSpec, DualMarketSpec,
    MarketSpec,
};
use crate::payoff::HomogeneousPayoff;
use crate::quadrature::{integrate_adaptive, AdaptiveTolerance, NormalRule};

/// Number of Gauss-Hermite nodes used for payoffs without a closed form.
pub const DUAL_QUADRATURE_NODES: usize = 501;

const D_CLIP: f64 = 40.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PricingMethod {
    ClosedForm,
    Quadrature,
    MonteCarlo,
}

impl PricingMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            PricingMethod::ClosedForm => "closed_form",
            PricingMethod::Quadrature => "quadrature",
            PricingMethod::MonteCarlo => "monte_carlo",
        }
    }
}

/// A price with its provenance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PriceQuote {
    pub value: f64,
    pub method: PricingMethod,
    pub std_error: f64,
}

impl PriceQuote {
    pub fn closed_form(value: f64) -> Self {
        Self {
            value,
            method: PricingMethod::ClosedForm,
            std_error: 0.0,
        }
    }

    fn quadrature(value: f64) -> Self {
        Self {
            value,
            method: PricingMethod::Quadrature,
            std_error: 0.0,
        }
    }
}

#[inline]
fn phi_clipped(d: f64) -> f64 {
    normal_cdf(d.clamp(-D_CLIP, D_CLIP))
}

/// Price of `(a S_T1 - b S_T2)_+` by the Margrabe formula.
pub fn margrabe_price(m: &MarketSpec, a: f64, b: f64, t: f64) -> Result<PriceQuote> {
    check_maturity(t)?;
    check_weight("a", a)?;
    check_weight("b", b)?;
    m.validate()?;
    if a == 0.0 {
        return Ok(PriceQuote::closed_form(0.0));
    }
    if b == 0.0 {
        return Ok(PriceQuote::closed_form(a * m.s01 * (-m.r1 * t).exp()));
    }
    let dual = dual_parameters(m)?;
    let sd = (dual.tilde_sigma_sq * t).sqrt();
    let log_moneyness = a.ln() + m.s01.ln() - b.ln() - m.s02.ln();
    let d1 = (log_moneyness + (m.r2 - m.r1 + 0.5 * dual.tilde_sigma_sq) * t) / sd;
    let d3 = d1 - sd;
    let value = a * m.s01 * (-m.r1 * t).exp() * phi_clipped(d1)
        - b * m.s02 * (-m.r2 * t).exp() * phi_clipped(d3);
    Ok(PriceQuote::closed_form(value.max(0.0)))
}

/// `(S02 / (c S01))^beta` and the `d`-pair `(d2, d4)` shared by the
/// power-exchange and knock-out formulas.
fn power_terms(m: &MarketSpec, dual: &DualMarketSpec, a: f64, b: f64, c: f64, t: f64) -> (f64, f64, f64) {
    let sd = (dual.tilde_sigma_sq * t).sqrt();
    let weight = (dual.beta * (m.s02.ln() - c.ln() - m.s01.ln())).exp();
    let log_m = a.ln() + m.s02.ln() - b.ln() - 2.0 * c.ln() - m.s01.ln();
    let d2 = (log_m + (m.r2 - m.r1 + 0.5 * dual.tilde_sigma_sq) * t) / sd;
    (weight, d2, d2 - sd)
}

/// Price of `(a/c S_T2 - b c S_T1)_+ (S_T2 / (c S_T1))^beta` with
/// `beta = 2 (r2 - r1) / tilde_sigma_sq` taken from the market.
///
/// For `0 < a <= b c` and an up barrier `c > s02/s01` this is the value of
/// the up-and-in exchange option.
pub fn power_exchange_price(m: &MarketSpec, a: f64, b: f64, c: f64, t: f64) -> Result<PriceQuote> {
    check_maturity(t)?;
    check_weight("a", a)?;
    check_weight("b", b)?;
    check_level(c)?;
    let dual = dual_parameters(m)?;
    if a == 0.0 {
        return Ok(PriceQuote::closed_form(0.0));
    }
    let (weight, d2, d4) = if b == 0.0 {
        let sd = (dual.tilde_sigma_sq * t).sqrt();
        let weight = (dual.beta * (m.s02.ln() - c.ln() - m.s01.ln())).exp();
        (weight, f64::INFINITY, f64::INFINITY - sd)
    } else {
        power_terms(m, &dual, a, b, c, t)
    };
    let value = a / c * m.s02 * weight * (-m.r1 * t).exp() * phi_clipped(d2)
        - b * c * m.s01 * weight * (-m.r2 * t).exp() * phi_clipped(d4);
    Ok(PriceQuote::closed_form(value.max(0.0)))
}

/// Domestic price of `(a/c S_T2 - b c S_T1)_+ (S_T2 / (c S_T1))^beta` for an
/// arbitrary exponent `beta`, computed from log-normal moments of the ratio
/// in the dual market.
pub fn power_exchange_price_with_beta(
    m: &MarketSpec,
    a: f64,
    b: f64,
    c: f64,
    beta: f64,
    t: f64,
) -> Result<PriceQuote> {
    check_maturity(t)?;
    let dual = dual_parameters(m)?;
    let undiscounted = dual_power_call_expectation(&dual, a, b, c, beta, t)?;
    Ok(PriceQuote::closed_form(m.s01 * (-m.r1 * t).exp() * undiscounted))
}

/// `E[ U^q 1{U > k} ]` for `U = F exp(Z)`, `Z ~ N(-v/2, v)`.
fn lognormal_partial_moment(forward: f64, v: f64, q: f64, k: f64) -> f64 {
    let sd = v.sqrt();
    let log_scale = q * forward.ln() + 0.5 * q * (q - 1.0) * v;
    let d = if k <= 0.0 {
        f64::INFINITY
    } else {
        ((forward / k).ln() + (q - 0.5) * v) / sd
    };
    log_scale.exp() * phi_clipped(d)
}

/// Dual-market expectation `E[(U/c)^beta (a U / c - b c)_+]` of the ratio
/// `U = S~_T` (no discounting, units of asset 1).
pub fn dual_power_call_expectation(
    dual: &DualMarketSpec,
    a: f64,
    b: f64,
    c: f64,
    beta: f64,
    t: f64,
) -> Result<f64> {
    check_maturity(t)?;
    check_weight("a", a)?;
    check_weight("b", b)?;
    check_level(c)?;
    if a == 0.0 {
        return Ok(0.0);
    }
    let v = dual.tilde_sigma_sq * t;
    let fwd = dual.forward(t);
    let kink = b * c * c / a;
    let up = (a / c) * c.powf(-beta) * lognormal_partial_moment(fwd, v, beta + 1.0, kink);
    let down = b * c.powf(1.0 - beta) * lognormal_partial_moment(fwd, v, beta, kink);
    Ok((up - down).max(0.0))
}

fn check_level(c: f64) -> Result<()> {
    if c.is_finite() && c > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidBarrier {
            reason: format!("level {c} must be positive and finite"),
        })
    }
}

fn check_knock_inputs(m: &MarketSpec, a: f64, b: f64, c: f64) -> Result<()> {
    m.validate()?;
    check_weight("a", a)?;
    check_weight("b", b)?;
    BarrierSpec::up_in(c).validate_against(m.spot_ratio())?;
    if !(a > 0.0 && a <= b * c) {
        return Err(Error::UnsupportedWeights { a, b, c });
    }
    Ok(())
}

/// Up-and-in exchange option: pays `(a S_T1 - b S_T2)_+` if the ratio
/// `S2/S1` reaches `c` before `T`. Requires `c > s02/s01` and `0 < a <= b c`.
pub fn knockin_exchange_price(m: &MarketSpec, a: f64, b: f64, c: f64, t: f64) -> Result<PriceQuote> {
    check_knock_inputs(m, a, b, c)?;
    power_exchange_price(m, a, b, c, t)
}

/// Up-and-out exchange option (the complement of
/// [`knockin_exchange_price`]), evaluated with the four-term formula.
pub fn knockout_exchange_price(m: &MarketSpec, a: f64, b: f64, c: f64, t: f64) -> Result<PriceQuote> {
    check_maturity(t)?;
    check_knock_inputs(m, a, b, c)?;
    let dual = dual_parameters(m)?;
    let sd = (dual.tilde_sigma_sq * t).sqrt();
    let log_m = a.ln() + m.s01.ln() - b.ln() - m.s02.ln();
    let d1 = (log_m + (m.r2 - m.r1 + 0.5 * dual.tilde_sigma_sq) * t) / sd;
    let d3 = d1 - sd;
    let (weight, d2, d4) = power_terms(m, &dual, a, b, c, t);
    let value = a
        * (-m.r1 * t).exp()
        * (m.s01 * phi_clipped(d1) - m.s02 / c * weight * phi_clipped(d2))
        - b * (-m.r2 * t).exp()
            * (m.s02 * phi_clipped(d3) - m.s01 * c * weight * phi_clipped(d4));
    Ok(PriceQuote::closed_form(value.max(0.0)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VanillaKind {
    Call,
    Put,
}

/// Price of a vanilla on the ratio `S~ = S2/S1` in the dual market.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DualVanillaQuote {
    /// Value in units of asset 1 (currency 1), discounted at `r1`.
    pub foreign_value: f64,
    /// Foreign value converted at the spot `s01`.
    pub domestic: PriceQuote,
}

/// Black-Scholes price of `(S~_T - K)_+` or `(K - S~_T)_+` in the dual
/// market. The domestic value is `s01 e^{-r1 T} E[payoff]`.
pub fn dual_vanilla_price(
    dual: &DualMarketSpec,
    kind: VanillaKind,
    strike: f64,
    t: f64,
    s01: f64,
    r1: f64,
) -> Result<DualVanillaQuote> {
    check_maturity(t)?;
    if !(strike.is_finite() && strike > 0.0) {
        return Err(Error::InvalidStrike { value: strike });
    }
    let dual = DualMarketSpec::new(dual.tilde_s0, dual.tilde_sigma_sq, dual.tilde_lambda)?;
    let fwd = dual.forward(t);
    let sd = (dual.tilde_sigma_sq * t).sqrt();
    let d1 = ((fwd / strike).ln() + 0.5 * sd * sd) / sd;
    let d2 = d1 - sd;
    let expectation = match kind {
        VanillaKind::Call => fwd * phi_clipped(d1) - strike * phi_clipped(d2),
        VanillaKind::Put => strike * phi_clipped(-d2) - fwd * phi_clipped(-d1),
    };
    let foreign_value = (-r1 * t).exp() * expectation.max(0.0);
    Ok(DualVanillaQuote {
        foreign_value,
        domestic: PriceQuote::closed_form(s01 * foreign_value),
    })
}

/// `s01 e^{-r1 T} E_dual[f(S~_T)]` by Gauss-Hermite quadrature over the
/// Gaussian log ratio.
pub fn dual_quadrature_price<F: Fn(f64) -> f64>(
    dual: &DualMarketSpec,
    f: F,
    t: f64,
    s01: f64,
    r1: f64,
) -> Result<PriceQuote> {
    check_maturity(t)?;
    let rule = NormalRule::gauss_hermite(DUAL_QUADRATURE_NODES);
    let fwd = dual.forward(t);
    let v = dual.tilde_sigma_sq * t;
    let sd = v.sqrt();
    let e = rule.expect(|z| f(fwd * (sd * z - 0.5 * v).exp()));
    Ok(PriceQuote::quadrature(s01 * (-r1 * t).exp() * e))
}

/// Like [`dual_quadrature_price`] for payoffs with kinks or jumps at
/// `breaks`: adaptive Gauss-Kronrod on the pieces of the standard-normal
/// line between them, truncated at 12 standard deviations.
pub fn dual_piecewise_price<F: Fn(f64) -> f64>(
    dual: &DualMarketSpec,
    f: F,
    breaks: &[f64],
    t: f64,
    s01: f64,
    r1: f64,
) -> Result<PriceQuote> {
    check_maturity(t)?;
    const Z_MAX: f64 = 12.0;
    let fwd = dual.forward(t);
    let v = dual.tilde_sigma_sq * t;
    let sd = v.sqrt();
    let mut zs: Vec<f64> = breaks
        .iter()
        .filter(|k| k.is_finite() && **k > 0.0)
        .map(|k| ((k / fwd).ln() + 0.5 * v) / sd)
        .filter(|z| z.abs() < Z_MAX)
        .collect();
    zs.push(-Z_MAX);
    zs.push(Z_MAX);
    zs.sort_by(f64::total_cmp);
    zs.dedup();
    let tol = AdaptiveTolerance {
        rel: 1e-12,
        abs: 1e-15,
        max_panels: 4000,
    };
    let mut e = 0.0;
    for w in zs.windows(2) {
        e += integrate_adaptive("dual piecewise price", |z| f(fwd * (sd * z - 0.5 * v).exp()) * normal_pdf(z), w[0], w[1], tol)?;
    }
    Ok(PriceQuote::quadrature(s01 * (-r1 * t).exp() * e))
}

/// Prices a European homogeneous payoff: closed forms for exchange and
/// power-exchange payoffs, dual-market quadrature for anything else.
pub fn price_european(m: &MarketSpec, g: &HomogeneousPayoff, t: f64) -> Result<PriceQuote> {
    check_maturity(t)?;
    let dual = dual_parameters(m)?;
    if let Some((a, b)) = g.as_exchange() {
        return margrabe_price(m, a, b, t);
    }
    if let Some((a, b, c, beta)) = g.as_power_exchange() {
        return if beta == dual.beta {
            power_exchange_price(m, a, b, c, t)
        } else {
            power_exchange_price_with_beta(m, a, b, c, beta, t)
        };
    }
    dual_piecewise_price(&dual, |u| g.ratio_profile(u), &g.ratio_breakpoints(), t, m.s01, m.r1)
}

/// Value of the barrier claim `g * 1{barrier event}` by the semi-static
/// hedge for exchange payoffs; other payoffs have no closed form here.
pub fn price_barrier_closed_form(
    m: &MarketSpec,
    g: &HomogeneousPayoff,
    barrier: &BarrierSpec,
    t: f64,
) -> Result<PriceQuote> {
    use crate::market::{BarrierDirection, Knock};
    let (a, b) = g.as_exchange().ok_or_else(|| {
        Error::UnsupportedLeg(format!("no closed form for barrier claim on {}", g.tag()))
    })?;
    if barrier.direction != BarrierDirection::Up {
        return Err(Error::UnsupportedLeg(
            "closed forms cover up barriers on exchange payoffs".into(),
        ));
    }
    match barrier.knock {
        Knock::In => knockin_exchange_price(m, a, b, barrier.level, t),
        Knock::Out => knockout_exchange_price(m, a, b, barrier.level, t),
    }
}
