//! Static replication of a ratio payoff by a bond, a forward on the ratio
//! and a strip of calls and puts:
//!
//! ```text
//! f(u) = f(k) + f'(k) (u - k) + int_{K<k} f''(K) (K - u)_+ dK + int_{K>k} f''(K) (u - K)_+ dK
//! ```
//!
//! discretized with trapezoidal weights on a strike grid. Kinks of `f`
//! (jumps of `f'`) are inserted into the grid and carry a point mass equal
//! to the jump.

use serde::Serialize;

use super::{HedgeLeg, LegPayoff};
use crate::error::{Error, Result};
use crate::payoff::RatioPayoff;

/// Default bound on the relative reconstruction error at interior strikes.
pub const REPLICATION_TOLERANCE: f64 = 1e-3;

/// Bond/forward/vanilla weights replicating a ratio payoff.
#[derive(Debug, Clone, Serialize)]
pub struct StaticReplication {
    /// Units of a bond paying 1 at maturity.
    pub bond: f64,
    /// Units of the ratio delivered at maturity.
    pub forward: f64,
    /// `(strike, quantity)` of calls.
    pub calls: Vec<(f64, f64)>,
    /// `(strike, quantity)` of puts.
    pub puts: Vec<(f64, f64)>,
    /// Expansion point.
    pub kappa: f64,
    /// Strikes actually used (input grid plus kinks and `kappa`).
    pub strikes: Vec<f64>,
    /// Largest relative error at interior strikes.
    pub max_relative_error: f64,
}

impl StaticReplication {
    pub fn eval(&self, u: f64) -> f64 {
        let calls: f64 = self.calls.iter().map(|(k, w)| w * (u - k).max(0.0)).sum();
        let puts: f64 = self.puts.iter().map(|(k, w)| w * (k - u).max(0.0)).sum();
        self.bond + self.forward * u + calls + puts
    }

    /// The replicating instruments as foreign hedge legs (zero weights
    /// dropped), each scaled by `quantity`.
    pub fn legs(&self, quantity: f64) -> Result<Vec<HedgeLeg>> {
        let mut out = Vec::new();
        if self.bond != 0.0 {
            out.push(HedgeLeg::new(LegPayoff::Foreign(RatioPayoff::bond()), quantity * self.bond, "bond")?);
        }
        if self.forward != 0.0 {
            out.push(HedgeLeg::new(
                LegPayoff::Foreign(RatioPayoff::forward()),
                quantity * self.forward,
                "ratio forward",
            )?);
        }
        for &(k, w) in &self.calls {
            if w != 0.0 {
                out.push(HedgeLeg::new(LegPayoff::Foreign(RatioPayoff::call(k)?), quantity * w, format!("call K={k:.6}"))?);
            }
        }
        for &(k, w) in &self.puts {
            if w != 0.0 {
                out.push(HedgeLeg::new(LegPayoff::Foreign(RatioPayoff::put(k)?), quantity * w, format!("put K={k:.6}"))?);
            }
        }
        Ok(out)
    }
}

/// `n` strikes spaced uniformly in `ln K` over `[lo, hi]`.
pub fn log_strike_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi > lo && n >= 2);
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

/// [`static_replicate_with_tolerance`] with [`REPLICATION_TOLERANCE`].
pub fn static_replicate(f: &RatioPayoff, kappa: f64, strikes: &[f64]) -> Result<StaticReplication> {
    static_replicate_with_tolerance(f, kappa, strikes, REPLICATION_TOLERANCE)
}

/// Builds the replication and checks it at the interior strikes.
///
/// The relative error at a strike `K` is `|rep(K) - f(K)| / max(|f(K)|,
/// 1e-9 max|f|)`; the floor only matters where `f` vanishes. Fails with
/// `GridTooCoarse` if the largest such error exceeds `tolerance`.
pub fn static_replicate_with_tolerance(
    f: &RatioPayoff,
    kappa: f64,
    strikes: &[f64],
    tolerance: f64,
) -> Result<StaticReplication> {
    if !(kappa.is_finite() && kappa > 0.0) {
        return Err(Error::InvalidStrike { value: kappa });
    }
    let mut grid: Vec<f64> = strikes.iter().copied().filter(|k| k.is_finite() && *k > 0.0).collect();
    if grid.len() < 2 {
        return Err(Error::InvalidConfig("strike grid needs at least two positive strikes".into()));
    }
    grid.sort_by(f64::total_cmp);
    let (lo, hi) = (grid[0], grid[grid.len() - 1]);
    if !(lo <= kappa && kappa <= hi) {
        return Err(Error::InvalidConfig(format!(
            "expansion point {kappa} outside the strike range [{lo}, {hi}]"
        )));
    }
    let kinks: Vec<f64> = f.kinks().into_iter().filter(|k| *k > lo && *k < hi).collect();
    grid.extend(kinks.iter().copied());
    grid.push(kappa);
    grid.sort_by(f64::total_cmp);
    grid.dedup_by(|a, b| (*a - *b).abs() <= 1e-14 * b.abs());
    let is_kink = |k: f64| kinks.iter().any(|q| (q - k).abs() <= 1e-14 * k.abs());

    // trapezoid of f'' with one-sided values at panel ends, plus kink masses
    let mut weights = vec![0.0; grid.len()];
    for j in 0..grid.len() - 1 {
        let (k0, k1) = (grid[j], grid[j + 1]);
        let h = k1 - k0;
        weights[j] += 0.5 * h * f.second_derivative(k0, true);
        weights[j + 1] += 0.5 * h * f.second_derivative(k1, false);
    }
    for (j, &k) in grid.iter().enumerate() {
        if is_kink(k) && k != kappa {
            weights[j] += f.derivative(k, true) - f.derivative(k, false);
        }
    }

    let slope = f.derivative(kappa, false);
    let bond = f.eval(kappa) - slope * kappa;
    let forward = slope;
    let mut calls = Vec::new();
    let mut puts = Vec::new();
    for (j, &k) in grid.iter().enumerate() {
        if k < kappa {
            puts.push((k, weights[j]));
        } else if k > kappa {
            calls.push((k, weights[j]));
        } else {
            // kappa carries half panels on each side plus any kink at kappa
            let left = if j > 0 { 0.5 * (k - grid[j - 1]) * f.second_derivative(k, false) } else { 0.0 };
            let jump = f.derivative(k, true) - f.derivative(k, false);
            puts.push((k, left));
            calls.push((k, weights[j] - left + jump));
        }
    }

    let mut rep = StaticReplication {
        bond,
        forward,
        calls,
        puts,
        kappa,
        strikes: grid.clone(),
        max_relative_error: 0.0,
    };
    let interior = &grid[1..grid.len() - 1];
    let scale = interior.iter().map(|k| f.eval(*k).abs()).fold(0.0, f64::max);
    let floor = 1e-9 * scale.max(f64::MIN_POSITIVE);
    rep.max_relative_error = interior
        .iter()
        .map(|&k| {
            let target = f.eval(k);
            (rep.eval(k) - target).abs() / target.abs().max(floor)
        })
        .fold(0.0, f64::max);
    if rep.max_relative_error > tolerance {
        return Err(Error::GridTooCoarse {
            max_error: rep.max_relative_error,
            tolerance,
        });
    }
    Ok(rep)
}
