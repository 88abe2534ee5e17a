//! Positive 1-homogeneous bivariate payoffs, payoffs on the price ratio and
//! the symmetry transforms acting on them.
//!
//! A homogeneous payoff `g(x, y)` satisfies `g(k x, k y) = k g(x, y)` for
//! `k > 0`, so it is determined by its ratio profile `g*(u) = g(1, u)`
//! through `g(x, y) = x g*(y / x)`. Payoffs carry structured metadata so
//! the analytic pricers can recognise exchange and power-exchange forms;
//! anything else is priced by quadrature or simulation.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::market::{check_weight, DualMarketSpec};

type Eval2 = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;
type Eval1 = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Which side of the line `y = c x` an indicator selects.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Region {
    /// `c x <= y`
    AtOrAbove,
    /// `c x < y`
    Above,
    /// `c x >= y`
    AtOrBelow,
    /// `c x > y`
    Below,
}

impl Region {
    fn contains(self, c: f64, x: f64, y: f64) -> bool {
        let cx = c * x;
        match self {
            Region::AtOrAbove => cx <= y,
            Region::Above => cx < y,
            Region::AtOrBelow => cx >= y,
            Region::Below => cx > y,
        }
    }
}

#[derive(Clone)]
enum Kind {
    Exchange { a: f64, b: f64 },
    PowerExchange { a: f64, b: f64, c: f64, beta: f64 },
    Max,
    Min,
    Straddle { a: f64, b: f64 },
    Swapped(Box<HomogeneousPayoff>),
    /// `(x, y) -> g(x / k, k y)`
    Rescaled { inner: Box<HomogeneousPayoff>, k: f64 },
    /// `(x, y) -> (y / (c x))^beta * g(y / c, c x)`
    Reflected { inner: Box<HomogeneousPayoff>, c: f64, beta: f64 },
    Indicator { inner: Box<HomogeneousPayoff>, c: f64, region: Region },
    Custom { name: String, f: Eval2 },
}

/// A positive 1-homogeneous payoff on `(S_T1, S_T2)`.
#[derive(Clone)]
pub struct HomogeneousPayoff {
    kind: Kind,
}

impl fmt::Debug for HomogeneousPayoff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.tag())
    }
}

/// Serializable description of a payoff.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case")]
pub enum PayoffMetadata {
    Exchange {
        a: f64,
        b: f64,
    },
    PowerExchange {
        a: f64,
        b: f64,
        c: f64,
        beta: f64,
    },
    /// Named payoff from a small catalogue (`max`, `min`, `straddle`);
    /// composite payoffs built by transforms are described by their tag.
    Custom {
        name: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        a: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        b: Option<f64>,
    },
}

#[inline]
fn pos(x: f64) -> f64 {
    if x > 0.0 {
        x
    } else {
        0.0
    }
}

#[inline]
fn power_weight(y: f64, c: f64, x: f64, beta: f64) -> f64 {
    if beta == 0.0 {
        1.0
    } else {
        (y / (c * x)).powf(beta)
    }
}

impl HomogeneousPayoff {
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        match &self.kind {
            Kind::Exchange { a, b } => pos(a * x - b * y),
            Kind::PowerExchange { a, b, c, beta } => {
                let w = power_weight(y, *c, x, *beta);
                let (u, v) = (y / c, c * x);
                w * pos(a * u - b * v)
            }
            Kind::Max => x.max(y),
            Kind::Min => x.min(y),
            Kind::Straddle { a, b } => (a * x - b * y).abs(),
            Kind::Swapped(g) => g.eval(y, x),
            Kind::Rescaled { inner, k } => inner.eval(x / k, k * y),
            Kind::Reflected { inner, c, beta } => {
                let w = power_weight(y, *c, x, *beta);
                w * inner.eval(y / c, c * x)
            }
            Kind::Indicator { inner, c, region } => {
                if region.contains(*c, x, y) {
                    inner.eval(x, y)
                } else {
                    0.0
                }
            }
            Kind::Custom { f, .. } => f(x, y),
        }
    }

    /// Ratio profile `g*(u) = g(1, u)`.
    pub fn ratio_profile(&self, u: f64) -> f64 {
        self.eval(1.0, u)
    }

    /// Points where the ratio profile has a kink or a jump. Empty for
    /// custom evaluators.
    pub fn ratio_breakpoints(&self) -> Vec<f64> {
        let mut out = match &self.kind {
            Kind::Exchange { a, b } | Kind::Straddle { a, b } => vec![a / b],
            Kind::PowerExchange { a, b, c, .. } => vec![b * c * c / a],
            Kind::Max | Kind::Min => vec![1.0],
            Kind::Swapped(g) => g.ratio_breakpoints().iter().map(|k| 1.0 / k).collect(),
            Kind::Rescaled { inner, k } => inner.ratio_breakpoints().iter().map(|p| p / (k * k)).collect(),
            Kind::Reflected { inner, c, .. } => inner.ratio_breakpoints().iter().map(|p| c * c / p).collect(),
            Kind::Indicator { inner, c, .. } => {
                let mut v = inner.ratio_breakpoints();
                v.push(*c);
                v
            }
            Kind::Custom { .. } => Vec::new(),
        };
        out.retain(|k| k.is_finite() && *k > 0.0);
        out.sort_by(f64::total_cmp);
        out.dedup();
        out
    }

    pub fn tag(&self) -> String {
        match &self.kind {
            Kind::Exchange { a, b } => format!("exchange(a={a}, b={b})"),
            Kind::PowerExchange { a, b, c, beta } => {
                format!("power_exchange(a={a}, b={b}, c={c}, beta={beta})")
            }
            Kind::Max => "max".into(),
            Kind::Min => "min".into(),
            Kind::Straddle { a, b } => format!("straddle(a={a}, b={b})"),
            Kind::Swapped(g) => format!("swap[{}]", g.tag()),
            Kind::Rescaled { inner, k } => format!("rescale[{}, k={k}]", inner.tag()),
            Kind::Reflected { inner, c, beta } => {
                format!("reflect[{}, c={c}, beta={beta}]", inner.tag())
            }
            Kind::Indicator { inner, c, region } => {
                format!("{}*1{{{region:?} c={c}}}", inner.tag())
            }
            Kind::Custom { name, .. } => name.clone(),
        }
    }

    pub fn metadata(&self) -> PayoffMetadata {
        match &self.kind {
            Kind::Exchange { a, b } => PayoffMetadata::Exchange { a: *a, b: *b },
            Kind::PowerExchange { a, b, c, beta } => PayoffMetadata::PowerExchange {
                a: *a,
                b: *b,
                c: *c,
                beta: *beta,
            },
            Kind::Straddle { a, b } => PayoffMetadata::Custom {
                name: "straddle".into(),
                a: Some(*a),
                b: Some(*b),
            },
            _ => PayoffMetadata::Custom {
                name: self.tag(),
                a: None,
                b: None,
            },
        }
    }

    pub fn from_metadata(meta: &PayoffMetadata) -> Result<Self> {
        match meta {
            PayoffMetadata::Exchange { a, b } => exchange_payoff(*a, *b),
            PayoffMetadata::PowerExchange { a, b, c, beta } => {
                power_exchange_payoff(*a, *b, *c, *beta)
            }
            PayoffMetadata::Custom { name, a, b } => match name.as_str() {
                "max" => Ok(Self::max()),
                "min" => Ok(Self::min()),
                "straddle" => {
                    let a = a.ok_or_else(|| Error::InvalidConfig("straddle needs a".into()))?;
                    let b = b.ok_or_else(|| Error::InvalidConfig("straddle needs b".into()))?;
                    check_weight("a", a)?;
                    check_weight("b", b)?;
                    Ok(Self {
                        kind: Kind::Straddle { a, b },
                    })
                }
                other => Err(Error::InvalidConfig(format!(
                    "unknown custom payoff '{other}' (known: max, min, straddle)"
                ))),
            },
        }
    }

    /// Weights `(a, b)` when this is a plain exchange payoff.
    pub fn as_exchange(&self) -> Option<(f64, f64)> {
        match self.kind {
            Kind::Exchange { a, b } => Some((a, b)),
            _ => None,
        }
    }

    /// Parameters `(a, b, c, beta)` when this is a power-exchange payoff.
    pub fn as_power_exchange(&self) -> Option<(f64, f64, f64, f64)> {
        match self.kind {
            Kind::PowerExchange { a, b, c, beta } => Some((a, b, c, beta)),
            _ => None,
        }
    }

    pub fn max() -> Self {
        Self { kind: Kind::Max }
    }

    pub fn min() -> Self {
        Self { kind: Kind::Min }
    }

    /// Wraps an arbitrary evaluator. Homogeneity is checked on a fixed set
    /// of sample points (relative tolerance 1e-12) and negative values are
    /// rejected.
    pub fn custom<F>(name: impl Into<String>, f: F) -> Result<Self>
    where
        F: Fn(f64, f64) -> f64 + Send + Sync + 'static,
    {
        let name = name.into();
        let f: Eval2 = Arc::new(f);
        for (x, y, k) in homogeneity_samples() {
            let base = f(x, y);
            let scaled = f(k * x, k * y);
            if base.is_nan() || base < 0.0 || !base.is_finite() {
                return Err(Error::InvalidConfig(format!(
                    "custom payoff '{name}' is negative or not finite at ({x}, {y})"
                )));
            }
            if (scaled - k * base).abs() > 1e-12 * (k * base).abs().max(1e-300) {
                return Err(Error::InvalidConfig(format!(
                    "custom payoff '{name}' is not positive 1-homogeneous at ({x}, {y}), k = {k}"
                )));
            }
        }
        Ok(Self {
            kind: Kind::Custom { name, f },
        })
    }

    /// Restricts the payoff to one side of the line `y = c x`.
    pub fn restricted(&self, c: f64, region: Region) -> Self {
        Self {
            kind: Kind::Indicator {
                inner: Box::new(self.clone()),
                c,
                region,
            },
        }
    }

    /// `(x, y) -> (y / (c x))^beta * g(y / c, c x)`, the reflected leg of
    /// the semi-static hedge.
    pub fn reflected(&self, c: f64, beta: f64) -> Self {
        if let Kind::Exchange { a, b } = self.kind {
            return Self {
                kind: Kind::PowerExchange { a, b, c, beta },
            };
        }
        Self {
            kind: Kind::Reflected {
                inner: Box::new(self.clone()),
                c,
                beta,
            },
        }
    }

    /// `(x, y) -> g(x / k, k y)`.
    pub fn rescaled(&self, k: f64) -> Self {
        Self {
            kind: Kind::Rescaled {
                inner: Box::new(self.clone()),
                k,
            },
        }
    }
}

/// Deterministic sample points used for the homogeneity check.
pub(crate) fn homogeneity_samples() -> impl Iterator<Item = (f64, f64, f64)> {
    // A small LCG keeps the check reproducible without pulling in an RNG.
    let mut state: u64 = 0x9E37_79B9_7F4A_7C15;
    let mut next = move || {
        state = state
            .wrapping_mul(6_364_136_223_846_793_005)
            .wrapping_add(1_442_695_040_888_963_407);
        (state >> 11) as f64 / (1u64 << 53) as f64
    };
    (0..64).map(move |_| {
        let x = 10f64.powf(4.0 * next() - 1.0);
        let y = 10f64.powf(4.0 * next() - 1.0);
        let k = 10f64.powf(4.0 * next() - 2.0);
        (x, y, k)
    })
}

/// `(a x - b y)_+` with ratio profile `(a - b u)_+`.
pub fn exchange_payoff(a: f64, b: f64) -> Result<HomogeneousPayoff> {
    check_weight("a", a)?;
    check_weight("b", b)?;
    Ok(HomogeneousPayoff {
        kind: Kind::Exchange { a, b },
    })
}

/// `(y / (c x))^beta * (a y / c - b c x)_+`.
pub fn power_exchange_payoff(a: f64, b: f64, c: f64, beta: f64) -> Result<HomogeneousPayoff> {
    check_weight("a", a)?;
    check_weight("b", b)?;
    if !(c.is_finite() && c > 0.0) {
        return Err(Error::InvalidBarrier {
            reason: format!("level {c} must be positive"),
        });
    }
    if !beta.is_finite() {
        return Err(Error::InvalidConfig(format!("beta {beta} is not finite")));
    }
    Ok(HomogeneousPayoff {
        kind: Kind::PowerExchange { a, b, c, beta },
    })
}

/// Exchanges the roles of the two arguments: `(x, y) -> g(y, x)`.
///
/// Evaluated at `(F2 e^{xi_1}, F1 e^{xi_2})` it gives the exponent-swapped
/// claim `g(F1 e^{xi_2}, F2 e^{xi_1})`. Applying it twice returns the
/// original payoff structurally.
pub fn swap_transform(g: &HomogeneousPayoff) -> HomogeneousPayoff {
    match &g.kind {
        Kind::Swapped(inner) => (**inner).clone(),
        Kind::Max | Kind::Min => g.clone(),
        _ => HomogeneousPayoff {
            kind: Kind::Swapped(Box::new(g.clone())),
        },
    }
}

/// Quasi-self-dual transform
/// `(x, y) -> ((s01/s02) (y/x))^beta * g((s01/s02) y, (s02/s01) x)`.
///
/// Pricing the result in the bivariate Black-Scholes market gives the same
/// value as pricing `g`. For an exchange payoff the result is the
/// power-exchange payoff with level `c = s02 / s01`.
pub fn qsd_transform(
    g: &HomogeneousPayoff,
    dual: &DualMarketSpec,
    s01: f64,
    s02: f64,
) -> Result<HomogeneousPayoff> {
    // Re-validate so a hand-built dual spec cannot slip through.
    let dual = DualMarketSpec::new(dual.tilde_s0, dual.tilde_sigma_sq, dual.tilde_lambda)?;
    Ok(g.reflected(s02 / s01, dual.beta))
}

#[derive(Clone)]
enum RatioKind {
    Bond,
    Forward,
    Call { strike: f64 },
    Put { strike: f64 },
    /// `(u / c)^beta * (a u / c - b c)_+`
    PowerCall { a: f64, b: f64, c: f64, beta: f64 },
    /// `(u / F) * f(F^2 / u)`
    SelfDual { inner: Box<RatioPayoff>, forward: f64 },
    Custom { name: String, f: Eval1, kinks: Vec<f64> },
}

/// A payoff on the ratio `u = S_T2 / S_T1`, per unit of asset 1.
///
/// Values may be negative for short legs. Every kind exposes analytic first
/// and second derivatives off its kink set, which the static replication
/// needs; custom payoffs fall back to finite differences.
#[derive(Clone)]
pub struct RatioPayoff {
    kind: RatioKind,
}

impl fmt::Debug for RatioPayoff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.tag())
    }
}

impl RatioPayoff {
    /// Pays 1 at maturity.
    pub fn bond() -> Self {
        Self {
            kind: RatioKind::Bond,
        }
    }

    /// Pays the ratio `u`.
    pub fn forward() -> Self {
        Self {
            kind: RatioKind::Forward,
        }
    }

    pub fn call(strike: f64) -> Result<Self> {
        check_strike(strike)?;
        Ok(Self {
            kind: RatioKind::Call { strike },
        })
    }

    pub fn put(strike: f64) -> Result<Self> {
        check_strike(strike)?;
        Ok(Self {
            kind: RatioKind::Put { strike },
        })
    }

    /// `(u / c)^beta * (a u / c - b c)_+`, equivalently
    /// `(a - b c^2 / u)_+ * (u / c)^(1 + beta)`.
    pub fn power_call(a: f64, b: f64, c: f64, beta: f64) -> Result<Self> {
        check_weight("a", a)?;
        check_weight("b", b)?;
        check_strike(c)?;
        Ok(Self {
            kind: RatioKind::PowerCall { a, b, c, beta },
        })
    }

    /// Custom payoff; `kinks` lists the points where the derivative jumps.
    pub fn custom<F>(name: impl Into<String>, f: F, kinks: Vec<f64>) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self {
            kind: RatioKind::Custom {
                name: name.into(),
                f: Arc::new(f),
                kinks,
            },
        }
    }

    pub fn as_call(&self) -> Option<f64> {
        match self.kind {
            RatioKind::Call { strike } => Some(strike),
            _ => None,
        }
    }

    pub fn as_put(&self) -> Option<f64> {
        match self.kind {
            RatioKind::Put { strike } => Some(strike),
            _ => None,
        }
    }

    pub fn as_power_call(&self) -> Option<(f64, f64, f64, f64)> {
        match self.kind {
            RatioKind::PowerCall { a, b, c, beta } => Some((a, b, c, beta)),
            _ => None,
        }
    }

    pub fn is_bond(&self) -> bool {
        matches!(self.kind, RatioKind::Bond)
    }

    pub fn is_forward(&self) -> bool {
        matches!(self.kind, RatioKind::Forward)
    }

    pub fn tag(&self) -> String {
        match &self.kind {
            RatioKind::Bond => "bond".into(),
            RatioKind::Forward => "forward".into(),
            RatioKind::Call { strike } => format!("call(K={strike})"),
            RatioKind::Put { strike } => format!("put(K={strike})"),
            RatioKind::PowerCall { a, b, c, beta } => {
                format!("power_call(a={a}, b={b}, c={c}, beta={beta})")
            }
            RatioKind::SelfDual { inner, forward } => {
                format!("self_dual[{}, F={forward}]", inner.tag())
            }
            RatioKind::Custom { name, .. } => name.clone(),
        }
    }

    pub fn eval(&self, u: f64) -> f64 {
        match &self.kind {
            RatioKind::Bond => 1.0,
            RatioKind::Forward => u,
            RatioKind::Call { strike } => pos(u - strike),
            RatioKind::Put { strike } => pos(strike - u),
            RatioKind::PowerCall { a, b, c, beta } => {
                let intrinsic = pos(a * u / c - b * c);
                if intrinsic == 0.0 {
                    0.0
                } else {
                    (u / c).powf(*beta) * intrinsic
                }
            }
            RatioKind::SelfDual { inner, forward } => (u / forward) * inner.eval(forward * forward / u),
            RatioKind::Custom { f, .. } => f(u),
        }
    }

    /// Points where the first derivative jumps.
    pub fn kinks(&self) -> Vec<f64> {
        match &self.kind {
            RatioKind::Bond | RatioKind::Forward => vec![],
            RatioKind::Call { strike } | RatioKind::Put { strike } => vec![*strike],
            RatioKind::PowerCall { a, b, c, .. } => {
                if *a > 0.0 {
                    vec![b * c * c / a]
                } else {
                    vec![]
                }
            }
            RatioKind::SelfDual { inner, forward } => {
                let mut k: Vec<f64> = inner.kinks().iter().map(|k| forward * forward / k).collect();
                k.sort_by(f64::total_cmp);
                k
            }
            RatioKind::Custom { kinks, .. } => kinks.clone(),
        }
    }

    /// First derivative; at a kink the right-hand derivative is returned
    /// when `right` is set and the left-hand one otherwise.
    pub fn derivative(&self, u: f64, right: bool) -> f64 {
        let on = |k: f64| if right { u >= k } else { u > k };
        match &self.kind {
            RatioKind::Bond => 0.0,
            RatioKind::Forward => 1.0,
            RatioKind::Call { strike } => {
                if on(*strike) {
                    1.0
                } else {
                    0.0
                }
            }
            RatioKind::Put { strike } => {
                if on(*strike) {
                    0.0
                } else {
                    -1.0
                }
            }
            RatioKind::PowerCall { a, b, c, beta } => {
                if *a == 0.0 || !on(b * c * c / a) {
                    return 0.0;
                }
                // f = (u/c)^beta (a u/c - b c)
                let w = (u / c).powf(*beta);
                w * (a / c) + beta * w / u * (a * u / c - b * c)
            }
            RatioKind::SelfDual { inner, forward } => {
                // d/du [(u/F) f(F^2/u)] = (f(v) - v f'(v)) / F with v = F^2/u;
                // v decreases in u, so sides swap.
                let v = forward * forward / u;
                (inner.eval(v) - v * inner.derivative(v, !right)) / forward
            }
            RatioKind::Custom { f, .. } => {
                let h = 1e-5 * u.abs().max(1e-8);
                if right {
                    (-3.0 * f(u) + 4.0 * f(u + h) - f(u + 2.0 * h)) / (2.0 * h)
                } else {
                    (3.0 * f(u) - 4.0 * f(u - h) + f(u - 2.0 * h)) / (2.0 * h)
                }
            }
        }
    }

    /// Second derivative off the kink set (one-sided at kinks).
    pub fn second_derivative(&self, u: f64, right: bool) -> f64 {
        let on = |k: f64| if right { u >= k } else { u > k };
        match &self.kind {
            RatioKind::Bond | RatioKind::Forward | RatioKind::Call { .. } | RatioKind::Put { .. } => 0.0,
            RatioKind::PowerCall { a, b, c, beta } => {
                if *a == 0.0 || !on(b * c * c / a) {
                    return 0.0;
                }
                // f = A u^(beta+1) - B u^beta with A = (a/c) c^-beta, B = b c^(1-beta)
                let big_a = (a / c) * c.powf(-beta);
                let big_b = b * c.powf(1.0 - beta);
                big_a * (beta + 1.0) * beta * u.powf(beta - 1.0)
                    - big_b * beta * (beta - 1.0) * u.powf(beta - 2.0)
            }
            RatioKind::SelfDual { inner, forward } => {
                let v = forward * forward / u;
                v * v * inner.second_derivative(v, !right) / (u * forward)
            }
            RatioKind::Custom { f, .. } => {
                let h = 1e-4 * u.abs().max(1e-8);
                if right {
                    (2.0 * f(u) - 5.0 * f(u + h) + 4.0 * f(u + 2.0 * h) - f(u + 3.0 * h)) / (h * h)
                } else {
                    (2.0 * f(u) - 5.0 * f(u - h) + 4.0 * f(u - 2.0 * h) - f(u - 3.0 * h)) / (h * h)
                }
            }
        }
    }
}

fn check_strike(k: f64) -> Result<()> {
    if k.is_finite() && k > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidStrike { value: k })
    }
}

/// Self-dual (put-call symmetry) transform relative to the forward ratio
/// `F`: `u -> (u / F) * f(F^2 / u)`.
///
/// Writing `u = F w` with the martingale factor `w = e^{xi}`, this is
/// `w -> w f(F / w)`, and `E f(F w) = E[w f(F / w)]` in the dual market.
/// Applying the transform twice with the same forward returns `f`.
pub fn self_dual_transform(f: &RatioPayoff, forward: f64) -> RatioPayoff {
    if let RatioKind::SelfDual { inner, forward: prev } = &f.kind {
        if *prev == forward {
            return (**inner).clone();
        }
    }
    RatioPayoff {
        kind: RatioKind::SelfDual {
            inner: Box::new(f.clone()),
            forward,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exchange_values() {
        let g = exchange_payoff(1.0, 1.0).unwrap();
        assert_eq!(g.eval(110.0, 95.0), 15.0);
        let zero = exchange_payoff(0.0, 3.0).unwrap();
        assert_eq!(zero.eval(110.0, 95.0), 0.0);
        assert_eq!(zero.eval(1.0, 1e-9), 0.0);
        let g = exchange_payoff(2.0, 1.0).unwrap();
        assert_eq!(g.eval(100.0, 150.0), 50.0);
        assert_eq!(g.eval(200.0, 300.0), 100.0);
        assert!(matches!(
            exchange_payoff(-1.0, 1.0),
            Err(Error::NegativeWeight { field: "a", .. })
        ));
    }

    #[test]
    fn ratio_profile_matches_representation() {
        let g = exchange_payoff(1.3, 0.7).unwrap();
        for (x, y, _) in homogeneity_samples() {
            let lhs = g.eval(x, y);
            let rhs = x * g.ratio_profile(y / x);
            assert!((lhs - rhs).abs() <= 1e-12 * lhs.abs().max(1e-300) + 1e-300);
        }
        assert_eq!(g.ratio_profile(1.0), 1.3 - 0.7);
    }

    #[test]
    fn swap_is_an_involution() {
        let g = exchange_payoff(1.2, 0.8).unwrap();
        let gg = swap_transform(&swap_transform(&g));
        for i in 0..100 {
            let x = 50.0 + i as f64;
            let y = 150.0 - 0.7 * i as f64;
            assert_eq!(gg.eval(x, y), g.eval(x, y));
        }
        let m = HomogeneousPayoff::max();
        let sm = swap_transform(&m);
        for i in 0..100 {
            let x = 50.0 + i as f64;
            let y = 120.0 - 0.3 * i as f64;
            assert_eq!(sm.eval(x, y), m.eval(x, y));
        }
    }

    #[test]
    fn qsd_with_zero_beta_and_equal_spots_is_swap() {
        let dual = DualMarketSpec::new(1.0, 0.07, 0.0).unwrap();
        let g = HomogeneousPayoff::custom("w", |x: f64, y: f64| (2.0 * x - y).max(0.0) + 0.5 * y).unwrap();
        let q = qsd_transform(&g, &dual, 100.0, 100.0).unwrap();
        let s = swap_transform(&g);
        for i in 0..200 {
            let x = 40.0 + i as f64;
            let y = 200.0 - 0.5 * i as f64;
            assert_eq!(q.eval(x, y), s.eval(x, y));
        }
    }

    #[test]
    fn qsd_of_exchange_is_power_exchange() {
        let dual = DualMarketSpec::new(0.95, 0.07, 0.01).unwrap();
        let g = exchange_payoff(1.0, 1.0).unwrap();
        let q = qsd_transform(&g, &dual, 100.0, 95.0).unwrap();
        let (a, b, c, beta) = q.as_power_exchange().unwrap();
        assert_eq!((a, b), (1.0, 1.0));
        assert_eq!(c, 0.95);
        assert_eq!(beta, dual.beta);
        // weight equals one on the spot-ratio line
        let x = 80.0;
        let y = 0.95 * x;
        assert!((q.eval(x, y) - (y / c - c * x).max(0.0)).abs() < 1e-12);
        let x: f64 = 90.0;
        let y: f64 = 110.0;
        let k: f64 = 100.0 / 95.0;
        let expect = (k * y / x).powf(dual.beta) * (k * y - x / k).max(0.0);
        assert!((q.eval(x, y) - expect).abs() < 1e-12 * expect);
    }

    #[test]
    fn custom_payoff_homogeneity_enforced() {
        assert!(HomogeneousPayoff::custom("sqrt", |x: f64, y: f64| (x * y).sqrt()).is_ok());
        assert!(HomogeneousPayoff::custom("bad", |x: f64, y: f64| x * y).is_err());
        assert!(HomogeneousPayoff::custom("neg", |x: f64, y: f64| x - y).is_err());
    }

    #[test]
    fn self_dual_examples() {
        let fwd = 1.07;
        let bond = RatioPayoff::bond();
        let t = self_dual_transform(&bond, fwd);
        for u in [0.5, 1.0, 1.3] {
            // w = u / F
            assert!((t.eval(u) - u / fwd).abs() < 1e-15);
        }
        let (a, b) = (1.0, 0.8);
        let put = RatioPayoff::custom("put", move |u: f64| (a - b * u).max(0.0), vec![a / b]);
        let t = self_dual_transform(&put, fwd);
        for i in 1..50 {
            let w = 0.05 * i as f64;
            let expect = (a * w - b * fwd).max(0.0);
            assert!((t.eval(fwd * w) - expect).abs() < 1e-12);
        }
        let back = self_dual_transform(&t, fwd);
        for i in 1..=100 {
            let u = 0.03 * i as f64;
            assert_eq!(back.eval(u), put.eval(u));
        }
    }

    #[test]
    fn power_call_forms_agree() {
        let (a, b, c, beta) = (1.0, 1.0, 1.05, -2.0 / 7.0);
        let f = RatioPayoff::power_call(a, b, c, beta).unwrap();
        for i in 1..300 {
            let u = 0.01 * i as f64;
            let alt = (a - b * c * c / u).max(0.0) * (u / c).powf(1.0 + beta);
            assert!((f.eval(u) - alt).abs() < 1e-13 * alt.max(1.0));
        }
        // analytic derivatives against central differences off the kink
        for u in [1.2, 1.5, 2.5] {
            let h = 1e-5;
            let d1 = (f.eval(u + h) - f.eval(u - h)) / (2.0 * h);
            let d2 = (f.eval(u + h) - 2.0 * f.eval(u) + f.eval(u - h)) / (h * h);
            assert!((f.derivative(u, true) - d1).abs() < 1e-7);
            assert!((f.second_derivative(u, true) - d2).abs() < 1e-4);
        }
    }

    #[test]
    fn metadata_json_shape() {
        let g = exchange_payoff(1.0, 2.0).unwrap();
        let json = serde_json::to_value(g.metadata()).unwrap();
        assert_eq!(json["kind"], "exchange");
        assert_eq!(json["params"]["b"], 2.0);
        let meta: PayoffMetadata =
            serde_json::from_str(r#"{"kind":"custom","params":{"name":"max"}}"#).unwrap();
        let m = HomogeneousPayoff::from_metadata(&meta).unwrap();
        assert_eq!(m.eval(3.0, 4.0), 4.0);
    }
}
