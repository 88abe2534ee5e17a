//! Rewrites the knock-out hedge as instruments of the foreign (asset 1)
//! market: puts on the ratio plus one power call.

use mbl::analytic::knockout_exchange_price;
use mbl::hedging::{describe_leg, foreign_decomposition, simplify_exchange_hedge};
use mbl::market::{Knock, MarketSpec};

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
    let dual = m.dual()?;
    let (a, b, c, t) = (1.0, 1.0, 1.05, 1.0);
    let domestic = simplify_exchange_hedge(a, b, c, &dual, Knock::Out)?;
    let foreign = foreign_decomposition(&domestic, &dual)?;
    let values = foreign.leg_values(&m, t)?;
    for (leg, v) in foreign.legs.iter().zip(&values) {
        println!("{:+8.4} x {:<60} {v:>12.8}", leg.quantity, describe_leg(leg));
    }
    let total: f64 = values.iter().sum();
    let closed = knockout_exchange_price(&m, a, b, c, t)?.value;
    println!("total {total:.12}\nclaim {closed:.12}");
    assert!((total - closed).abs() < 1e-10);
    Ok(())
}

#[allow(dead_code)]
fn main() -> mbl::Result<()> {
    run_example()
}
