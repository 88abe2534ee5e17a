mod common;

use common::*;
use mbl::analytic::{knockin_exchange_price, knockout_exchange_price, margrabe_price, price_european};
use mbl::market::{BarrierSpec, MarketSpec};
use mbl::mc::{
    bridge_crossing_probability, hedge_replication_experiment, margrabe_symmetry_mc, price_barrier_mc,
    price_european_mc, simulate_paths, SimConfig,
};
use mbl::payoff::{exchange_payoff, HomogeneousPayoff};
use mbl::Error;
use rand::Rng;
use rand_distr::StandardNormal;

#[test]
fn same_seed_same_numbers_regardless_of_threads() {
    let m = m_star();
    let g = exchange_payoff(1.0, 1.0).unwrap();
    let cfg = SimConfig::new(10_000, 32, 42).with_bridge(true);
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| price_barrier_mc(&m, &g, &BarrierSpec::up_in(1.05), 1.0, &cfg).unwrap())
    };
    let a = run(1);
    let b = run(3);
    assert_eq!(a.value.to_bits(), b.value.to_bits());
    assert_eq!(a.std_error.to_bits(), b.std_error.to_bits());
    let c = price_barrier_mc(&m, &g, &BarrierSpec::up_in(1.05), 1.0, &SimConfig { seed: 43, ..cfg }).unwrap();
    assert_ne!(a.value, c.value);
}

#[test]
fn european_estimates_bracket_closed_forms() {
    let mut r = rng(8);
    for _ in 0..5 {
        let m = random_market(&mut r);
        let t = r.gen_range(0.2..3.0);
        let cfg = SimConfig::new(200_000, 1, r.gen());
        let e = price_european_mc(&m, &exchange_payoff(1.0, 1.0).unwrap(), t, &cfg).unwrap();
        let cf = margrabe_price(&m, 1.0, 1.0, t).unwrap().value;
        assert!(e.within(cf, 4.0), "{e:?} vs {cf}");
        let e = price_european_mc(&m, &HomogeneousPayoff::max(), t, &cfg).unwrap();
        let q = price_european(&m, &HomogeneousPayoff::max(), t).unwrap().value;
        assert!(e.within(q, 4.0), "{e:?} vs {q}");
    }
}

#[test]
fn discounted_assets_are_martingales() {
    let batch = simulate_paths(&m_star(), 2.0, &SimConfig::new(50_000, 8, 1)).unwrap();
    for (mean, se) in batch.martingale_check(&m_star()) {
        assert!((mean - 1.0).abs() < 4.0 * se, "{mean} +- {se}");
    }
    assert_eq!(batch.ratio_path(0).len(), 9);
    assert!((batch.ratio_path(0)[0] - 0.95).abs() < 1e-12);
}

#[test]
fn antithetic_sampling_needs_even_paths() {
    let m = m_star();
    let g = exchange_payoff(1.0, 1.0).unwrap();
    let odd = SimConfig::new(1001, 1, 0).with_antithetic(true);
    assert!(price_european_mc(&m, &g, 1.0, &odd).is_err());
    let even = SimConfig::new(100_000, 1, 0).with_antithetic(true);
    let e = price_european_mc(&m, &g, 1.0, &even).unwrap();
    assert!(e.within(margrabe_price(&m, 1.0, 1.0, 1.0).unwrap().value, 4.0));
}

#[test]
fn bridge_probability_matches_fine_simulation() {
    let (r0, r1, c, s2, dt) = (1.0, 1.02, 1.08, 0.07, 0.25);
    let p = bridge_crossing_probability(r0, r1, &BarrierSpec::up_in(c), s2, dt);
    let mut g = rng(99);
    let (n, k) = (4000, 4000);
    let (x0, x1, lvl) = (f64::ln(r0), f64::ln(r1), f64::ln(c));
    let h = dt / k as f64;
    let mut hits = 0;
    for _ in 0..n {
        // Brownian bridge by conditioning a random walk on its endpoint.
        let mut w = vec![0.0; k + 1];
        for j in 1..=k {
            let z: f64 = g.sample(StandardNormal);
            w[j] = w[j - 1] + (s2 * h).sqrt() * z;
        }
        let end = w[k];
        let hit = (0..=k).any(|j| {
            let u = j as f64 / k as f64;
            x0 + w[j] - u * end + u * (x1 - x0) >= lvl
        });
        hits += hit as u32;
    }
    let phat = hits as f64 / n as f64;
    let se = (p * (1.0 - p) / n as f64).sqrt();
    // The discrete grid misses some crossings: the estimate sits slightly low.
    assert!(phat <= p + 3.0 * se && phat >= p - 6.0 * se, "{phat} vs {p}");
    assert_eq!(bridge_crossing_probability(1.0, 1.1, &BarrierSpec::up_in(1.08), s2, dt), 1.0);
}

#[test]
fn barrier_estimates_against_closed_forms() {
    let m = m_star();
    let g = exchange_payoff(1.0, 1.0).unwrap();
    let cfg = SimConfig::new(100_000, 64, 5).with_bridge(true);
    let ki = price_barrier_mc(&m, &g, &BarrierSpec::up_in(1.05), 1.0, &cfg).unwrap();
    assert!(ki.within(M_STAR_KNOCKIN, 3.5), "{ki:?}");
    let ko = price_barrier_mc(&m, &g, &BarrierSpec::up_out(1.05), 1.0, &cfg).unwrap();
    let cf = knockout_exchange_price(&m, 1.0, 1.0, 1.05, 1.0).unwrap().value;
    assert!(ko.within(cf, 3.5), "{ko:?} vs {cf}");
    // Same paths: in + out is the European estimate.
    let eu = price_european_mc(&m, &g, 1.0, &SimConfig::new(100_000, 64, 5)).unwrap();
    assert!(eu.value > 0.0 && (ki.value + ko.value - margrabe_price(&m, 1.0, 1.0, 1.0).unwrap().value).abs() < 5.0 * eu.std_error);
}

#[test]
fn bridge_removes_discrete_monitoring_bias() {
    let m = m_star();
    let g = exchange_payoff(1.0, 1.0).unwrap();
    let plain = price_barrier_mc(&m, &g, &BarrierSpec::up_in(1.05), 1.0, &SimConfig::new(50_000, 16, 3)).unwrap();
    let bridged =
        price_barrier_mc(&m, &g, &BarrierSpec::up_in(1.05), 1.0, &SimConfig::new(50_000, 16, 3).with_bridge(true)).unwrap();
    assert!(M_STAR_KNOCKIN - plain.value > 10.0 * plain.std_error);
    assert!(bridged.within(M_STAR_KNOCKIN, 3.5));
}

#[test]
fn random_knockins_within_error_bars() {
    let mut r = rng(17);
    for _ in 0..3 {
        let d = random_draw(&mut r);
        let g = exchange_payoff(d.a, d.b).unwrap();
        let cfg = SimConfig::new(40_000, 64, r.gen()).with_bridge(true);
        let e = price_barrier_mc(&d.m, &g, &BarrierSpec::up_in(d.c), d.t, &cfg).unwrap();
        let cf = knockin_exchange_price(&d.m, d.a, d.b, d.c, d.t).unwrap().value;
        assert!((e.value - cf).abs() <= 4.0 * e.std_error + 1e-9, "{e:?} vs {cf}");
    }
}

#[test]
fn symmetry_holds_for_several_payoffs() {
    let m = MarketSpec { r1: 0.0, r2: 0.04, ..m_star() };
    for g in [exchange_payoff(1.0, 1.0).unwrap(), exchange_payoff(1.3, 0.7).unwrap(), HomogeneousPayoff::min()] {
        let s = margrabe_symmetry_mc(&m, &g, 1.5, &SimConfig::new(200_000, 1, 2)).unwrap();
        assert!(s.agrees(4.0), "{s:?}");
    }
}

#[test]
fn snapped_replication_is_exact() {
    let r = hedge_replication_experiment(&m_star(), 1.0, 1.0, 1.05, 1.0, &SimConfig::new(4_000, 32, 9), true).unwrap();
    assert!(r.n_hits > 1000);
    assert!(r.max_abs_gap < 1e-10);
    assert!(r.no_hit_hedge_max < 1e-12);
}

#[test]
fn overshoot_gap_is_positive_and_shrinks() {
    let m = m_star();
    let gaps: Vec<f64> = [16, 64, 256]
        .iter()
        .map(|&n| hedge_replication_experiment(&m, 1.0, 1.0, 1.05, 1.0, &SimConfig::new(4_000, n, 9), false).unwrap().mean_gap)
        .collect();
    assert!(gaps[0] > gaps[1] && gaps[1] > gaps[2] && gaps[2] > 0.0, "{gaps:?}");
}

#[test]
fn budget_is_enforced() {
    let cfg = SimConfig { budget: 1000, ..SimConfig::new(100, 11, 0) };
    assert!(matches!(cfg.validate(), Err(Error::BudgetExceeded { requested: 1100, .. })));
    assert!(SimConfig::new(0, 1, 0).validate().is_err());
    assert!(simulate_paths(&m_star(), 1.0, &SimConfig::new(1 << 20, 1 << 10, 0)).is_err());
}
