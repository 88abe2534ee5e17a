//! Margrabe price of an exchange option and the same number from the dual
//! market, as `b` puts on the price ratio.

use mbl::analytic::{dual_vanilla_price, margrabe_price, VanillaKind};
use mbl::market::{dual_parameters, MarketSpec};

pub fn run_example() -> mbl::Result<()> {
    let m = MarketSpec {
        s01: 100.0,
        s02: 95.0,
        sigma1: 0.2,
        sigma2: 0.3,
        rho: 0.5,
        r: 0.05,
        r1: 0.02,
        r2: 0.01,
    };
    let (a, b, t) = (1.0, 1.0, 1.0);
    let direct = margrabe_price(&m, a, b, t)?.value;

    let dual = dual_parameters(&m)?;
    let put = dual_vanilla_price(&dual, VanillaKind::Put, a / b, t, m.s01, m.r1)?;
    let via_dual = b * put.domestic.value;

    println!("exchange option (a S1 - b S2)+, T = {t}");
    println!("  margrabe        {direct:.12}");
    println!("  dual-market put {via_dual:.12}");
    println!("  sigma~^2 = {:.6}, beta = {:.6}", dual.tilde_sigma_sq, dual.beta);
    assert!((direct - via_dual).abs() < 1e-10);
    Ok(())
}

#[allow(dead_code)]
fn main() -> mbl::Result<()> {
    run_example()
}
