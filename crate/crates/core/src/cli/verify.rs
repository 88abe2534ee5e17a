use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use super::config::RunConfig;
use super::report::{num, Report};
use crate::analytic::{
    dual_vanilla_price, knockin_exchange_price, knockout_exchange_price, margrabe_price, power_exchange_price_with_beta,
    VanillaKind,
};
use crate::error::Result;
use crate::hedging::{foreign_decomposition, log_strike_grid, simplify_exchange_hedge, static_replicate};
use crate::market::{dual_parameters, BarrierDirection, BarrierSpec, DualMarketSpec, Knock, MarketSpec};
use crate::mc::{hedge_replication_experiment, margrabe_symmetry_mc, price_barrier_mc, SimConfig};
use crate::payoff::{exchange_payoff, HomogeneousPayoff, RatioPayoff};
use crate::subordination::{
    bivariate_triplet, dual_ratio_levy_density, gamma_vector, replication_gap_experiment, simulate_subordinated_paths,
    subordinated_symmetry_check, BrownianDriver, SubordinatorSpec,
};

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    /// The quantity compared against `tolerance`.
    pub statistic: f64,
    pub tolerance: f64,
    pub detail: String,
}

impl Check {
    fn at_most(name: &str, statistic: f64, tolerance: f64, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            passed: statistic.is_finite() && statistic <= tolerance,
            statistic,
            tolerance,
            detail: detail.into(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyOutcome {
    pub suite: String,
    pub passed: bool,
    pub checks: Vec<Check>,
}

impl VerifyOutcome {
    pub fn report(&self) -> Report {
        let mut r = Report::new(
            &["check", "passed", "statistic", "tolerance", "detail"],
            serde_json::to_value(self).unwrap_or_else(|_| json!({})),
        );
        for c in &self.checks {
            r.push(vec![c.name.clone(), c.passed.to_string(), num(c.statistic), num(c.tolerance), c.detail.clone()]);
        }
        r
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct VerifyOptions {
    pub subordinated: bool,
    pub kappa: Option<f64>,
    /// Uses `-beta` in the power-weighted leg: the symmetry checks must fail.
    pub negate_beta: bool,
}

/// A random market with an up barrier and admissible weights.
pub(crate) struct Draw {
    pub m: MarketSpec,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub t: f64,
}

pub(crate) fn random_draw(rng: &mut ChaCha8Rng) -> Draw {
    let s01 = rng.gen_range(50.0..150.0);
    let m = MarketSpec {
        s01,
        s02: s01 * rng.gen_range(0.7..1.3),
        sigma1: rng.gen_range(0.05..0.6),
        sigma2: rng.gen_range(0.05..0.6),
        rho: rng.gen_range(-0.9..0.9),
        r: rng.gen_range(0.0..0.1),
        r1: rng.gen_range(0.0..0.1),
        r2: rng.gen_range(0.0..0.1),
    };
    let c = m.spot_ratio() * rng.gen_range(1.01..1.5);
    let b = rng.gen_range(0.5..2.0);
    let a = b * c * rng.gen_range(0.2..1.0);
    Draw {
        m,
        a,
        b,
        c,
        t: rng.gen_range(0.1..3.0),
    }
}

fn claim_weights(cfg: &RunConfig) -> (f64, f64, f64) {
    let c = match cfg.claim.barrier {
        Some(b) if b.direction == BarrierDirection::Up => b.level,
        _ => cfg.market.spot_ratio() * 1.05,
    };
    match exchange_payoff_weights(cfg) {
        Some((a, b)) if a > 0.0 && a <= b * c => (a, b, c),
        _ => (1.0, 1.0, c),
    }
}

fn exchange_payoff_weights(cfg: &RunConfig) -> Option<(f64, f64)> {
    cfg.payoff().ok()?.as_exchange()
}

/// Parity, symmetry, hedge and Monte Carlo checks on the configured market.
pub fn default_suite(cfg: &RunConfig, opts: &VerifyOptions) -> Result<VerifyOutcome> {
    cfg.validate()?;
    let sim = cfg.sim_or_default();
    let mut rng = ChaCha8Rng::seed_from_u64(sim.seed);
    let draws: Vec<Draw> = (0..200).map(|_| random_draw(&mut rng)).collect();
    let sign = if opts.negate_beta { -1.0 } else { 1.0 };
    let mut checks = Vec::new();

    let mut worst = 0.0f64;
    for d in &draws {
        let ki = knockin_exchange_price(&d.m, d.a, d.b, d.c, d.t)?.value;
        let ko = knockout_exchange_price(&d.m, d.a, d.b, d.c, d.t)?.value;
        let mg = margrabe_price(&d.m, d.a, d.b, d.t)?.value;
        worst = worst.max((ki + ko - mg).abs());
    }
    checks.push(Check::at_most("knock_in_out_parity", worst, 1e-10, "max |in + out - european| over 200 draws"));

    let mut worst = 0.0f64;
    for d in &draws {
        let on = d.m.with_spots(d.m.s01, d.c * d.m.s01);
        let beta = sign * dual_parameters(&on)?.beta;
        let pe = power_exchange_price_with_beta(&on, d.a, d.b, d.c, beta, d.t)?.value;
        let mg = margrabe_price(&on, d.a, d.b, d.t)?.value;
        worst = worst.max((pe - mg).abs());
    }
    checks.push(Check::at_most(
        "barrier_manifold_symmetry",
        worst,
        1e-10,
        "max |power exchange - exchange| with S2 = c S1, 200 draws",
    ));

    let mut worst = 0.0f64;
    for d in &draws {
        let dual = dual_parameters(&d.m)?;
        let mg = margrabe_price(&d.m, d.a, d.b, d.t)?.value;
        let put = dual_vanilla_price(&dual, VanillaKind::Put, d.a / d.b, d.t, d.m.s01, d.m.r1)?.domestic.value;
        worst = worst.max((mg - d.b * put).abs());
    }
    checks.push(Check::at_most("dual_market_equivalence", worst, 1e-12, "max |exchange - b puts on the ratio|"));

    let mut worst = 0.0f64;
    for d in &draws {
        let dual = dual_parameters(&d.m)?;
        let unit = DualMarketSpec::new(1.0, dual.tilde_sigma_sq, 0.0)?;
        let fwd = dual.forward(d.t);
        let put = dual_vanilla_price(&unit, VanillaKind::Put, d.a / (d.b * fwd), d.t, 1.0, 0.0)?.foreign_value * d.b * fwd;
        let call = dual_vanilla_price(&unit, VanillaKind::Call, d.b * fwd / d.a, d.t, 1.0, 0.0)?.foreign_value * d.a;
        worst = worst.max((put - call).abs() / d.a.max(d.b * fwd));
    }
    checks.push(Check::at_most("put_call_symmetry", worst, 1e-12, "gap of the symmetric put and call per unit notional"));

    let m = cfg.market;
    let t = cfg.claim.maturity;
    let (a, b, c) = claim_weights(cfg);
    let dual = dual_parameters(&m)?;

    let on = m.with_spots(m.s01, c * m.s01);
    let mut worst = 0.0f64;
    for k in 1..=20 {
        let rem = t * k as f64 / 20.0;
        let pe = power_exchange_price_with_beta(&on, a, b, c, sign * dual.beta, rem)?.value;
        worst = worst.max((pe - margrabe_price(&on, a, b, rem)?.value).abs());
    }
    checks.push(Check::at_most(
        "hedge_switch_at_barrier",
        worst,
        1e-10,
        "hedge leg minus claim on the barrier, 20 remaining maturities",
    ));

    let ko = knockout_exchange_price(&m, a, b, c, t)?.value;
    let hedge = foreign_decomposition(&simplify_exchange_hedge(a, b, c, &dual, Knock::Out)?, &dual)?;
    let hv = hedge.value(&m, t)?;
    checks.push(Check::at_most(
        "foreign_hedge_value",
        (hv - ko).abs(),
        1e-10,
        format!("vanilla hedge {hv} vs knock-out {ko}"),
    ));

    let f = RatioPayoff::power_call(a, b, c, dual.beta)?;
    let grid = log_strike_grid(0.25 * c, 4.0 * c, 400);
    let kink = b * c * c / a;
    let rep = static_replicate(&f, kink, &grid)?;
    let err = rep
        .strikes
        .iter()
        .filter(|k| **k >= 0.5 * c && **k <= 2.0 * c)
        .map(|&k| {
            let v = f.eval(k);
            (rep.eval(k) - v).abs() / v.abs().max(1e-9)
        })
        .fold(0.0, f64::max);
    checks.push(Check::at_most("static_replication", err, 1e-3, "max relative error on [0.5, 2] c, 400 strikes"));

    let g = exchange_payoff(a, b)?;
    let sym = margrabe_symmetry_mc(&m, &g, t, &SimConfig { n_paths: 100_000, n_steps: 1, ..sim })?;
    checks.push(Check::at_most(
        "mc_exchange_symmetry",
        sym.difference.abs() / sym.combined_se,
        3.0,
        format!("{} vs {}", sym.original.value, sym.swapped.value),
    ));

    let bar = BarrierSpec::up_in(c);
    let mc_cfg = SimConfig {
        n_paths: 100_000,
        n_steps: 128,
        bridge_correction: true,
        ..sim
    };
    let est = price_barrier_mc(&m, &g, &bar, t, &mc_cfg)?;
    let cf = knockin_exchange_price(&m, a, b, c, t)?.value;
    checks.push(Check::at_most(
        "mc_barrier_vs_closed_form",
        (est.value - cf).abs() / est.std_error,
        3.0,
        format!("estimate {} +- {} vs {cf}", est.value, est.std_error),
    ));

    let rep = hedge_replication_experiment(&m, a, b, c, t, &SimConfig { n_paths: 5_000, n_steps: 64, ..sim }, true)?;
    checks.push(Check::at_most(
        "snapped_replication_gap",
        rep.max_abs_gap,
        1e-10,
        format!("{} hits", rep.n_hits),
    ));

    Ok(outcome("default", checks))
}

/// Martingale, symmetry, density and drift checks for the subordinated
/// driver of the configured market.
pub fn subordinated_suite(cfg: &RunConfig, opts: &VerifyOptions) -> Result<VerifyOutcome> {
    cfg.validate()?;
    let sub = match (opts.kappa, cfg.subordinator) {
        (Some(k), _) => SubordinatorSpec::gamma(k),
        (None, Some(s)) => s,
        (None, None) => SubordinatorSpec::gamma(0.2),
    };
    sub.validate()?;
    let sim = cfg.sim_or_default();
    let m = cfg.market;
    let t = cfg.claim.maturity;
    let driver = BrownianDriver::from_market(&m);
    let mut checks = Vec::new();

    let batch = simulate_subordinated_paths(&driver, &sub, t, &SimConfig { n_paths: 100_000, n_steps: 1, ..sim })?;
    let mart = batch.martingale_check();
    let z = mart.iter().map(|(mean, se)| (mean - 1.0).abs() / se).fold(0.0, f64::max);
    checks.push(Check::at_most(
        "martingale",
        z,
        3.0,
        format!("E e^xi1 = {} +- {}, E e^xi2 = {} +- {}", mart[0].0, mart[0].1, mart[1].0, mart[1].1),
    ));

    let payoffs = [
        ("symmetry_exchange", exchange_payoff(1.0, 1.0)?),
        ("symmetry_max", HomogeneousPayoff::max()),
        ("symmetry_weighted_exchange", exchange_payoff(1.2, 0.8)?),
    ];
    for (name, g) in payoffs {
        let s = subordinated_symmetry_check(&m, &g, &sub, t, &SimConfig { n_paths: 100_000, n_steps: 1, ..sim })?;
        let stat = if s.combined_se > 0.0 { s.difference.abs() / s.combined_se } else { s.difference.abs() };
        checks.push(Check::at_most(name, stat, 3.0, format!("{} vs {}", s.original.value, s.swapped.value)));
    }

    let mut worst = 0.0f64;
    for i in -20..=20 {
        if i == 0 {
            continue;
        }
        let y = 0.1 * i as f64;
        let p = dual_ratio_levy_density(y, &driver, &sub)?;
        let q = dual_ratio_levy_density(-y, &driver, &sub)?;
        if q > 0.0 {
            worst = worst.max((p * y.exp() / q - 1.0).abs());
        }
    }
    checks.push(Check::at_most("ratio_density_symmetry", worst, 1e-6, "40 nonzero points of a 0.1 grid on [-2, 2]"));

    let gv = gamma_vector(&driver, &sub)?;
    checks.push(Check::at_most(
        "gamma_routes",
        gv.max_relative_difference(),
        1e-4,
        format!("direct {:?}, martingale {:?}", gv.direct, gv.martingale),
    ));

    let tri = bivariate_triplet(&driver, &sub)?;
    let zero = Complex64::new(0.0, 0.0);
    let mi = Complex64::new(0.0, -1.0);
    let p1 = tri.characteristic_exponent([mi, zero])?.norm();
    let p2 = tri.characteristic_exponent([zero, mi])?.norm();
    checks.push(Check::at_most(
        "martingale_closure",
        p1.max(p2),
        1e-6,
        "|psi(-i e_j)| from the triplet",
    ));

    let eq = MarketSpec { r2: m.r1, ..m };
    let (a, b, c) = claim_weights(cfg);
    let c = c.max(eq.spot_ratio() * 1.01);
    let gap = replication_gap_experiment(
        &eq,
        a.min(b * c),
        b,
        c,
        &sub,
        t,
        &SimConfig { n_paths: 2_000, n_steps: 32, ..sim },
        2_000,
        false,
    )?;
    checks.push(Check::at_most(
        "super_replication",
        -gap.mean_gap / gap.std_error.max(f64::MIN_POSITIVE),
        3.0,
        format!("mean gap {} +- {} over {} hits (r2 set to r1)", gap.mean_gap, gap.std_error, gap.n_hits),
    ));

    Ok(outcome("subordinated", checks))
}

fn outcome(suite: &str, checks: Vec<Check>) -> VerifyOutcome {
    VerifyOutcome {
        suite: suite.into(),
        passed: checks.iter().all(|c| c.passed),
        checks,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_suite_passes_and_negative_control_fails() {
        let cfg = RunConfig::reference();
        let ok = default_suite(&cfg, &VerifyOptions::default()).unwrap();
        assert!(ok.passed, "{:#?}", ok.checks);
        let bad = default_suite(&cfg, &VerifyOptions { negate_beta: true, ..Default::default() }).unwrap();
        assert!(!bad.passed);
        let failed: Vec<_> = bad.checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
        assert_eq!(failed, ["barrier_manifold_symmetry", "hedge_switch_at_barrier"]);
    }
}
