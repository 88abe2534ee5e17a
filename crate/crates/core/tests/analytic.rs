mod common;

use common::*;
use mbl::analytic::{
    dual_vanilla_price, knockin_exchange_price, knockout_exchange_price, margrabe_price, power_exchange_price,
    price_european, VanillaKind,
};
use mbl::market::dual_parameters;
use mbl::payoff::{exchange_payoff, HomogeneousPayoff, PayoffMetadata};
use mbl::Error;

#[test]
fn margrabe_matches_two_dimensional_oracle() {
    let m = m_star();
    let v = margrabe_price(&m, 1.0, 1.0, 1.0).unwrap().value;
    let o = oracle_exchange(&m, 1.0, 1.0, 1.0);
    assert!((v - o).abs() < 1e-9 * o, "{v} vs {o}");

    let mut r = rng(7);
    for _ in 0..30 {
        let d = random_draw(&mut r);
        let v = margrabe_price(&d.m, d.a, d.b, d.t).unwrap().value;
        let o = oracle_exchange(&d.m, d.a, d.b, d.t);
        assert!((v - o).abs() < 1e-8 * o.max(1e-6), "{v} vs {o}");
    }
}

#[test]
fn power_exchange_matches_oracle_with_unequal_costs() {
    let m = m_star();
    let beta = beta_of(&m);
    let v = power_exchange_price(&m, 1.0, 1.0, 1.05, 1.0).unwrap().value;
    let o = oracle_power_exchange(&m, 1.0, 1.0, 1.05, beta, 1.0);
    assert!((v - o).abs() < 1e-8 * o, "{v} vs {o}");
}

#[test]
fn knockin_reference_value() {
    let v = knockin_exchange_price(&m_star(), 1.0, 1.0, 1.05, 1.0).unwrap().value;
    assert!((v - M_STAR_KNOCKIN).abs() < 1e-12);
}

#[test]
fn knockin_is_power_exchange_and_bounded_by_european() {
    let mut r = rng(3);
    for _ in 0..200 {
        let d = random_draw(&mut r);
        let ki = knockin_exchange_price(&d.m, d.a, d.b, d.c, d.t).unwrap().value;
        let ko = knockout_exchange_price(&d.m, d.a, d.b, d.c, d.t).unwrap().value;
        let eu = margrabe_price(&d.m, d.a, d.b, d.t).unwrap().value;
        assert!(ki >= -1e-12 && ko >= -1e-12);
        assert!((ki + ko - eu).abs() < 1e-10 * eu.max(1.0));
        let pe = power_exchange_price(&d.m, d.a, d.b, d.c, d.t).unwrap().value;
        assert!((ki - pe).abs() < 1e-12 * pe.max(1.0));
    }
}

#[test]
fn barrier_far_away_means_no_knock_in() {
    let m = m_star();
    let ki = knockin_exchange_price(&m, 1.0, 1.0, 50.0, 1.0).unwrap().value;
    assert!(ki < 1e-12);
    let ko = knockout_exchange_price(&m, 1.0, 1.0, 50.0, 1.0).unwrap().value;
    let eu = margrabe_price(&m, 1.0, 1.0, 1.0).unwrap().value;
    assert!((ko - eu).abs() < 1e-10);
}

#[test]
fn dual_put_equals_margrabe() {
    let mut r = rng(11);
    for _ in 0..100 {
        let d = random_draw(&mut r);
        let dual = dual_parameters(&d.m).unwrap();
        let put = dual_vanilla_price(&dual, VanillaKind::Put, d.a / d.b, d.t, d.m.s01, d.m.r1).unwrap();
        let mg = margrabe_price(&d.m, d.a, d.b, d.t).unwrap().value;
        assert!((d.b * put.domestic.value - mg).abs() < 1e-12 * mg.max(1.0));
    }
}

#[test]
fn european_max_and_straddle_against_oracle() {
    let m = m_star();
    let v = price_european(&m, &HomogeneousPayoff::max(), 1.0).unwrap().value;
    let o = oracle_price(&m, 1.0, Some(1.0), |x, y| x.max(y));
    assert!((v - o).abs() < 1e-8 * o, "{v} vs {o}");

    let meta = PayoffMetadata::Custom { name: "straddle".into(), a: Some(1.0), b: Some(0.9) };
    let g = HomogeneousPayoff::from_metadata(&meta).unwrap();
    let v = price_european(&m, &g, 2.0).unwrap().value;
    let o = oracle_price(&m, 2.0, Some(1.0 / 0.9), |x, y| (x - 0.9 * y).abs());
    assert!((v - o).abs() < 1e-8 * o, "{v} vs {o}");
}

#[test]
fn restricted_legs_add_up() {
    // g 1{y >= c x} + g 1{y < c x} = g, priced piecewise.
    let m = m_star();
    let g = exchange_payoff(1.3, 1.0).unwrap();
    let up = g.restricted(1.0, mbl::payoff::Region::AtOrAbove);
    let down = g.restricted(1.0, mbl::payoff::Region::Below);
    let total = price_european(&m, &up, 1.0).unwrap().value + price_european(&m, &down, 1.0).unwrap().value;
    let mg = margrabe_price(&m, 1.3, 1.0, 1.0).unwrap().value;
    assert!((total - mg).abs() < 1e-9 * mg);
}

#[test]
fn input_errors() {
    let m = m_star();
    assert!(matches!(margrabe_price(&m, 1.0, 1.0, 0.0), Err(Error::NonpositiveMaturity { .. })));
    assert!(matches!(knockin_exchange_price(&m, 1.2, 1.0, 1.05, 1.0), Err(Error::UnsupportedWeights { .. })));
    assert!(matches!(knockin_exchange_price(&m, 0.5, 1.0, 0.9, 1.0), Err(Error::InvalidBarrier { .. })));
    let mut bad = m;
    bad.sigma1 = -0.1;
    assert!(bad.validate().is_err());
}
