use super::{BrownianDriver, SubordinatedStepper, SubordinatorSpec};
use crate::error::{Error, Result};
use crate::market::{check_maturity, BarrierSpec, MarketSpec};
use crate::mc::{gap_report, par_chunks, symmetry_from_draws, ReplicationReport, SimConfig, SymmetryReport};
use crate::payoff::HomogeneousPayoff;

/// Estimates `e^{-rT} E g(F1 e^{xi^_T1}, F2 e^{xi^_T2})` and the claim with
/// the exponents swapped, from common draws of the clock and the Brownian
/// motion. `xi^` has the martingale drift of the market.
pub fn subordinated_symmetry_check(
    m: &MarketSpec,
    g: &HomogeneousPayoff,
    sub: &SubordinatorSpec,
    t: f64,
    cfg: &SimConfig,
) -> Result<SymmetryReport> {
    m.validate()?;
    sub.validate()?;
    check_maturity(t)?;
    cfg.validate()?;
    let st = SubordinatedStepper::new(&BrownianDriver::from_market(m), sub, t)?;
    Ok(symmetry_from_draws(g, m.forward1(t), m.forward2(t), (-m.r * t).exp(), cfg, |rng| {
        let (_, x1, x2) = st.sample(rng);
        (x1, x2)
    }))
}

/// Gap `hedge - claim` of the semi-static hedge of the up-and-in exchange
/// claim `(a S1 - b S2)_+` under a subordinated driver, at the first
/// monitoring date with `S2 >= c S1`.
///
/// Jumps overshoot the barrier, so at the switch the hedge leg `(a/c S2 - b c
/// S1)_+` and the claim are valued separately by `inner_paths` conditional
/// draws over the remaining time, common to both. Requires equal carrying
/// costs. `snap` projects the hit state onto `S2 = c S1`.
#[allow(clippy::too_many_arguments)]
pub fn replication_gap_experiment(
    m: &MarketSpec,
    a: f64,
    b: f64,
    c: f64,
    sub: &SubordinatorSpec,
    t: f64,
    cfg: &SimConfig,
    inner_paths: u64,
    snap: bool,
) -> Result<ReplicationReport> {
    m.validate()?;
    sub.validate()?;
    check_maturity(t)?;
    cfg.validate()?;
    if m.r1 != m.r2 {
        return Err(Error::UnequalCarryingCosts { r1: m.r1, r2: m.r2 });
    }
    BarrierSpec::up_in(c).validate_against(m.spot_ratio())?;
    crate::mc::experiment_weights(a, b, c)?;
    if inner_paths == 0 {
        return Err(Error::InvalidConfig("inner_paths must be at least 1".into()));
    }
    let requested = cfg.n_paths as u128 * (cfg.n_steps as u128 + inner_paths as u128);
    if requested > cfg.budget {
        return Err(Error::BudgetExceeded {
            requested,
            budget: cfg.budget,
        });
    }
    let driver = BrownianDriver::from_market(m);
    let n = cfg.n_steps as usize;
    let dt = t / n as f64;
    let outer = SubordinatedStepper::new(&driver, sub, dt)?;
    let lam = m.lambda1();
    let hedge = |s1: f64, s2: f64| (a / c * s2 - b * c * s1).max(0.0);
    let claim = |s1: f64, s2: f64| (a * s1 - b * s2).max(0.0);
    let (l1_0, l2_0, lc) = (m.s01.ln(), m.s02.ln(), c.ln());

    let parts = par_chunks(cfg.seed, cfg.n_paths, |_, paths, rng| -> Result<(Vec<f64>, f64)> {
        let mut gaps = Vec::new();
        let mut no_hit_max = 0.0f64;
        for _ in 0..paths {
            let (mut x1, mut x2) = (0.0, 0.0);
            let mut hit_at = None;
            for k in 1..=n {
                let (_, d1, d2) = outer.sample(rng);
                x1 += d1;
                x2 += d2;
                if l2_0 + x2 - l1_0 - x1 >= lc {
                    hit_at = Some(k);
                    break;
                }
            }
            let Some(k) = hit_at else {
                let tt = lam * t;
                no_hit_max = no_hit_max.max(hedge((l1_0 + tt + x1).exp(), (l2_0 + tt + x2).exp()));
                continue;
            };
            let tk = k as f64 * dt;
            let s1 = (l1_0 + lam * tk + x1).exp();
            let s2 = if snap { c * s1 } else { (l2_0 + lam * tk + x2).exp() };
            let rem = if k == n { 0.0 } else { t - tk };
            if rem == 0.0 {
                gaps.push(hedge(s1, s2) - claim(s1, s2));
                continue;
            }
            let inner = SubordinatedStepper::new(&driver, sub, rem)?;
            let growth = (lam * rem).exp();
            let mut sum = 0.0;
            for _ in 0..inner_paths {
                let (_, d1, d2) = inner.sample(rng);
                let (y1, y2) = (s1 * growth * d1.exp(), s2 * growth * d2.exp());
                sum += hedge(y1, y2) - claim(y1, y2);
            }
            gaps.push((-m.r * rem).exp() * sum / inner_paths as f64);
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
