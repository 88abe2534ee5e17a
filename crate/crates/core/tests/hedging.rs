mod common;

use common::*;
use mbl::analytic::{knockin_exchange_price, margrabe_price, power_exchange_price};
use mbl::hedging::{
    build_hedge, foreign_decomposition, log_strike_grid, simplify_exchange_hedge, static_replicate, LegPayoff,
};
use mbl::market::{BarrierSpec, Knock, MarketSpec};
use mbl::payoff::{exchange_payoff, HomogeneousPayoff, RatioPayoff};
use mbl::Error;

fn grid_points() -> impl Iterator<Item = (f64, f64)> {
    (0..100).flat_map(|i| {
        (0..100).map(move |j| (20.0 * 1.03f64.powi(i), 20.0 * 1.03f64.powi(j)))
    })
}

#[test]
fn reduced_and_general_knockin_hedges_agree_pointwise() {
    for m in [m_star(), MarketSpec { r2: 0.02, ..m_star() }] {
        let dual = m.dual().unwrap();
        for (a, c) in [(1.0, 1.05), (0.7, 1.2)] {
            let reduced = simplify_exchange_hedge(a, 1.0, c, &dual, Knock::In).unwrap();
            let general = build_hedge(&exchange_payoff(a, 1.0).unwrap(), &BarrierSpec::up_in(c), &dual).unwrap();
            for (x, y) in grid_points() {
                assert_eq!(reduced.payoff(x, y), general.payoff(x, y), "({x}, {y})");
            }
        }
    }
}

#[test]
fn equal_costs_give_plain_reflected_leg() {
    let m = MarketSpec { r2: 0.02, ..m_star() };
    let p = simplify_exchange_hedge(1.0, 1.0, 1.05, &m.dual().unwrap(), Knock::In).unwrap();
    assert_eq!(p.legs.len(), 1);
    for (x, y) in grid_points() {
        let expect = (y / 1.05 - 1.05 * x).max(0.0);
        assert!((p.payoff(x, y) - expect).abs() <= 1e-12 * expect.max(1.0));
    }
}

#[test]
fn knockin_hedge_is_worthless_below_the_barrier() {
    let m = m_star();
    let dual = m.dual().unwrap();
    for g in [exchange_payoff(1.0, 1.0).unwrap(), HomogeneousPayoff::max()] {
        let p = build_hedge(&g, &BarrierSpec::up_in(1.05), &dual).unwrap();
        for (x, y) in grid_points().filter(|(x, y)| *y < 1.05 * x) {
            assert_eq!(p.payoff(x, y), 0.0);
        }
    }
}

#[test]
fn in_plus_out_is_the_european_claim_pointwise() {
    let dual = m_star().dual().unwrap();
    for g in [exchange_payoff(1.0, 0.8).unwrap(), HomogeneousPayoff::max(), HomogeneousPayoff::min()] {
        for (ki, ko) in [
            (BarrierSpec::up_in(1.1), BarrierSpec::up_out(1.1)),
            (BarrierSpec::down_in(0.8), BarrierSpec::down_out(0.8)),
        ] {
            let pi = build_hedge(&g, &ki, &dual).unwrap();
            let po = build_hedge(&g, &ko, &dual).unwrap();
            assert_eq!(po.legs.len(), 3);
            for (x, y) in grid_points() {
                let e = g.eval(x, y);
                assert!((pi.payoff(x, y) + po.payoff(x, y) - e).abs() <= 1e-12 * e.max(1.0));
            }
        }
    }
}

#[test]
fn hedge_equals_claim_on_the_barrier() {
    let mut r = rng(21);
    for _ in 0..200 {
        let d = random_draw(&mut r);
        let on = d.m.with_spots(d.m.s01, d.c * d.m.s01);
        let pe = power_exchange_price(&on, d.a, d.b, d.c, d.t).unwrap().value;
        let mg = margrabe_price(&on, d.a, d.b, d.t).unwrap().value;
        assert!((pe - mg).abs() < 1e-10 * mg.max(1.0), "{pe} vs {mg}");
    }
}

#[test]
fn hedge_value_is_the_knockin_price() {
    let m = m_star();
    let dual = m.dual().unwrap();
    let p = simplify_exchange_hedge(1.0, 1.0, 1.05, &dual, Knock::In).unwrap();
    assert!((p.value(&m, 1.0).unwrap() - M_STAR_KNOCKIN).abs() < 1e-12);
    let general = build_hedge(&exchange_payoff(1.0, 1.0).unwrap(), &BarrierSpec::up_in(1.05), &dual).unwrap();
    assert!((general.value(&m, 1.0).unwrap() - M_STAR_KNOCKIN).abs() < 1e-8);
}

#[test]
fn foreign_decomposition_instruments() {
    let m = MarketSpec { r2: 0.02, ..m_star() };
    let dual = m.dual().unwrap();
    let p = foreign_decomposition(&simplify_exchange_hedge(1.0, 1.0, 1.05, &dual, Knock::Out).unwrap(), &dual).unwrap();
    let legs: Vec<_> = p
        .legs
        .iter()
        .map(|l| match &l.payoff {
            LegPayoff::Foreign(f) => (f.as_put(), f.as_call(), l.quantity),
            LegPayoff::Domestic(_) => panic!("domestic leg left"),
        })
        .collect();
    assert_eq!(legs[0], (Some(1.0), None, 1.0));
    assert!((legs[1].1.unwrap() - 1.1025).abs() < 1e-12);
    assert!((legs[1].2 + 1.0 / 1.05).abs() < 1e-12);
}

#[test]
fn foreign_legs_keep_their_domestic_value() {
    let mut r = rng(5);
    for _ in 0..100 {
        let d = random_draw(&mut r);
        let dual = d.m.dual().unwrap();
        for knock in [Knock::In, Knock::Out] {
            let dom = simplify_exchange_hedge(d.a, d.b, d.c, &dual, knock).unwrap();
            let fx = foreign_decomposition(&dom, &dual).unwrap();
            let dv = dom.value(&d.m, d.t).unwrap();
            let fv = fx.value(&d.m, d.t).unwrap();
            assert!((dv - fv).abs() < 1e-12 * dv.abs().max(1.0), "{dv} vs {fv}");
            for (x, y) in [(80.0, 90.0), (100.0, 120.0), (50.0, 140.0)] {
                assert!((dom.payoff(x, y) - fx.payoff(x, y)).abs() < 1e-10 * dom.payoff(x, y).abs().max(1.0));
            }
        }
        let ki = knockin_exchange_price(&d.m, d.a, d.b, d.c, d.t).unwrap().value;
        let fv = foreign_decomposition(&simplify_exchange_hedge(d.a, d.b, d.c, &dual, Knock::In).unwrap(), &dual)
            .unwrap()
            .value(&d.m, d.t)
            .unwrap();
        assert!((ki - fv).abs() < 1e-10 * ki.max(1.0));
    }
}

#[test]
fn static_replication_of_linear_payoffs() {
    let grid = log_strike_grid(0.2, 5.0, 50);
    let fwd = static_replicate(&RatioPayoff::forward(), 1.0, &grid).unwrap();
    assert!(fwd.bond.abs() < 1e-14 && (fwd.forward - 1.0).abs() < 1e-14);
    assert!(fwd.calls.iter().chain(&fwd.puts).all(|(_, w)| w.abs() < 1e-12));
    let bond = static_replicate(&RatioPayoff::bond(), 1.0, &grid).unwrap();
    assert!((bond.bond - 1.0).abs() < 1e-14 && bond.forward.abs() < 1e-14);
    assert!(bond.calls.iter().chain(&bond.puts).all(|(_, w)| w.abs() < 1e-12));
}

#[test]
fn static_replication_of_a_call_is_that_call() {
    let grid = log_strike_grid(0.5, 2.0, 40);
    let rep = static_replicate(&RatioPayoff::call(1.1).unwrap(), 1.0, &grid).unwrap();
    for u in [0.6, 1.0, 1.1, 1.5, 1.9] {
        assert!((rep.eval(u) - (u - 1.1f64).max(0.0)).abs() < 1e-12);
    }
}

#[test]
fn power_call_strip_converges() {
    let m = m_star();
    let dual = m.dual().unwrap();
    let f = RatioPayoff::power_call(1.0, 1.0, 1.05, dual.beta).unwrap();
    let errs: Vec<f64> = [100, 200, 400]
        .iter()
        .map(|&n| static_replicate(&f, 1.1025, &log_strike_grid(0.2625, 4.2, n)).unwrap().max_relative_error)
        .collect();
    assert!(errs[1] < errs[0] / 3.0 && errs[2] < errs[1] / 3.0, "{errs:?}");
    let coarse = static_replicate(&f, 1.1025, &log_strike_grid(0.2625, 4.2, 10));
    assert!(matches!(coarse, Err(Error::GridTooCoarse { .. })));
}

#[test]
fn unsupported_inputs() {
    let dual = m_star().dual().unwrap();
    assert!(matches!(
        simplify_exchange_hedge(1.2, 1.0, 1.05, &dual, Knock::In),
        Err(Error::UnsupportedWeights { .. })
    ));
    let p = build_hedge(&HomogeneousPayoff::max(), &BarrierSpec::up_in(1.05), &dual).unwrap();
    assert!(matches!(foreign_decomposition(&p, &dual), Err(Error::UnsupportedLeg(_))));
    assert!(build_hedge(&HomogeneousPayoff::max(), &BarrierSpec::up_in(0.9), &dual).is_err());
}
