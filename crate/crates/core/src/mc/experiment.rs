use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::paths::{fill_normals, Stepper};
use super::{par_chunks, Moments, PriceEstimate, SimConfig};
use crate::analytic::{margrabe_price, power_exchange_price};
use crate::error::{Error, Result};
use crate::market::{check_maturity, dual_parameters, BarrierSpec, MarketSpec};
use crate::payoff::{power_exchange_payoff, HomogeneousPayoff};

/// Distribution of `hedge value - claim value` at the first hitting time,
/// over the paths that hit.
#[derive(Debug, Clone, Serialize)]
pub struct ReplicationReport {
    pub n_paths: u64,
    pub n_steps: u32,
    pub n_hits: u64,
    pub mean_gap: f64,
    pub std_error: f64,
    pub max_abs_gap: f64,
    /// `(probability, quantile)` pairs.
    pub quantiles: Vec<(f64, f64)>,
    /// Largest terminal hedge payoff on paths that never hit.
    pub no_hit_hedge_max: f64,
    pub snapped: bool,
}

const QUANTILE_LEVELS: [f64; 7] = [0.01, 0.05, 0.25, 0.5, 0.75, 0.95, 0.99];

pub(crate) fn gap_report(mut gaps: Vec<f64>, n_paths: u64, n_steps: u32, no_hit_hedge_max: f64, snapped: bool) -> ReplicationReport {
    let mut mo = Moments::default();
    gaps.iter().for_each(|g| mo.push(*g));
    let max_abs_gap = gaps.iter().fold(0.0f64, |m, g| m.max(g.abs()));
    gaps.sort_by(f64::total_cmp);
    let quantiles = if gaps.is_empty() {
        Vec::new()
    } else {
        QUANTILE_LEVELS
            .iter()
            .map(|&p| {
                let h = p * (gaps.len() - 1) as f64;
                let i = h.floor() as usize;
                let j = (i + 1).min(gaps.len() - 1);
                (p, gaps[i] + (h - i as f64) * (gaps[j] - gaps[i]))
            })
            .collect()
    };
    ReplicationReport {
        n_paths,
        n_steps,
        n_hits: gaps.len() as u64,
        mean_gap: mo.mean,
        std_error: mo.std_error(),
        max_abs_gap,
        quantiles,
        no_hit_hedge_max,
        snapped,
    }
}

pub(crate) fn check_knockin_weights(a: f64, b: f64, c: f64) -> Result<()> {
    if !(a > 0.0 && b.is_finite() && a <= b * c) {
        return Err(Error::UnsupportedWeights { a, b, c });
    }
    Ok(())
}

/// Switches the power-exchange hedge of the up-and-in exchange claim into
/// the claim at the first monitoring date with `S2 >= c S1`, and records the
/// difference of their closed-form values there.
///
/// With `snap`, the hit state is projected onto the barrier (`S2 = c S1`),
/// where the difference vanishes identically.
pub fn hedge_replication_experiment(
    m: &MarketSpec,
    a: f64,
    b: f64,
    c: f64,
    t: f64,
    cfg: &SimConfig,
    snap: bool,
) -> Result<ReplicationReport> {
    m.validate()?;
    check_maturity(t)?;
    BarrierSpec::up_in(c).validate_against(m.spot_ratio())?;
    check_knockin_weights(a, b, c)?;
    cfg.validate()?;
    let dual = dual_parameters(m)?;
    let hedge_payoff = power_exchange_payoff(a, b, c, dual.beta)?;
    let n = cfg.n_steps as usize;
    let st = Stepper::new(m, t, n);
    let lc = c.ln();

    let parts = par_chunks(cfg.seed, cfg.n_paths, |_, paths, rng| -> Result<(Vec<f64>, f64)> {
        let mut z = vec![0.0; 2 * n];
        let mut gaps = Vec::new();
        let mut no_hit_max = 0.0f64;
        for _ in 0..paths {
            fill_normals(rng, &mut z);
            let (mut x1, mut x2) = (st.x1_0, st.x2_0);
            let mut hit_at = None;
            for k in 0..n {
                st.step(&mut x1, &mut x2, z[2 * k], z[2 * k + 1]);
                if x2 - x1 >= lc {
                    hit_at = Some(k + 1);
                    break;
                }
            }
            match hit_at {
                Some(k) => {
                    let s1 = x1.exp();
                    let s2 = if snap { c * s1 } else { x2.exp() };
                    let rem = if k == n { 0.0 } else { t - k as f64 * st.dt };
                    let (claim, hedge) = if rem > 0.0 {
                        let mk = m.with_spots(s1, s2);
                        (margrabe_price(&mk, a, b, rem)?.value, power_exchange_price(&mk, a, b, c, rem)?.value)
                    } else {
                        ((a * s1 - b * s2).max(0.0), hedge_payoff.eval(s1, s2))
                    };
                    gaps.push(hedge - claim);
                }
                None => {
                    no_hit_max = no_hit_max.max(hedge_payoff.eval(x1.exp(), x2.exp()));
                }
            }
        }
        Ok((gaps, no_hit_max))
    });
    let mut gaps = Vec::new();
    let mut no_hit_max = 0.0f64;
    for p in parts {
        let (g, h) = p?;
        gaps.extend(g);
        no_hit_max = no_hit_max.max(h);
    }
    Ok(gap_report(gaps, cfg.n_paths, cfg.n_steps, no_hit_max, snap))
}

/// Monte Carlo estimates of a claim and of its exponent-swapped twin from
/// the same draws.
#[derive(Debug, Clone, Serialize)]
pub struct SymmetryReport {
    pub original: PriceEstimate,
    pub swapped: PriceEstimate,
    pub difference: f64,
    /// `sqrt(se_original^2 + se_swapped^2)`.
    pub combined_se: f64,
}

impl SymmetryReport {
    /// Whether the estimates agree within `k` combined standard errors.
    pub fn agrees(&self, k: f64) -> bool {
        self.difference.abs() <= k * self.combined_se
    }
}

/// Estimates `e^{-rT} E g(F1 e^{x1}, F2 e^{x2})` and `e^{-rT} E g(F1 e^{x2},
/// F2 e^{x1})` with `(x1, x2)` sampled by `draw`.
pub(crate) fn symmetry_from_draws<D>(
    g: &HomogeneousPayoff,
    f1: f64,
    f2: f64,
    disc: f64,
    cfg: &SimConfig,
    draw: D,
) -> SymmetryReport
where
    D: Fn(&mut ChaCha8Rng) -> (f64, f64) + Sync,
{
    let parts = par_chunks(cfg.seed, cfg.n_paths, |_, paths, rng| {
        let mut o = Moments::default();
        let mut s = Moments::default();
        for _ in 0..paths {
            let (x1, x2) = draw(rng);
            let (e1, e2) = (x1.exp(), x2.exp());
            o.push(disc * g.eval(f1 * e1, f2 * e2));
            s.push(disc * g.eval(f1 * e2, f2 * e1));
        }
        (o, s)
    });
    let o = Moments::combine(&parts.iter().map(|p| p.0).collect::<Vec<_>>());
    let s = Moments::combine(&parts.iter().map(|p| p.1).collect::<Vec<_>>());
    let est = |m: &Moments| PriceEstimate {
        value: m.mean,
        std_error: m.std_error(),
        n_paths: cfg.n_paths,
        hit_fraction: 0.0,
    };
    let (original, swapped) = (est(&o), est(&s));
    SymmetryReport {
        difference: original.value - swapped.value,
        combined_se: original.std_error.hypot(swapped.std_error),
        original,
        swapped,
    }
}

/// Symmetry of homogeneous claims in the Black-Scholes model: the value of
/// `g(F1 e^{xi_T1}, F2 e^{xi_T2})` is unchanged when the exponents are swapped.
pub fn margrabe_symmetry_mc(m: &MarketSpec, g: &HomogeneousPayoff, t: f64, cfg: &SimConfig) -> Result<SymmetryReport> {
    m.validate()?;
    check_maturity(t)?;
    cfg.validate()?;
    let st = Stepper::new(m, t, 1);
    let (f1, f2) = (m.forward1(t), m.forward2(t));
    let (l1, l2) = (m.s01.ln() + m.lambda1() * t, m.s02.ln() + m.lambda2() * t);
    Ok(symmetry_from_draws(g, f1, f2, (-m.r * t).exp(), cfg, |rng| {
        let mut z = [0.0; 2];
        fill_normals(rng, &mut z);
        let (mut x1, mut x2) = (st.x1_0, st.x2_0);
        st.step(&mut x1, &mut x2, z[0], z[1]);
        (x1 - l1, x2 - l2)
    }))
}
