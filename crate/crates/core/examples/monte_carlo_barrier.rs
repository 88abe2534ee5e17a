//! Monte Carlo knock-in price against the closed form, with and without the
//! Brownian-bridge crossing correction.

use mbl::analytic::knockin_exchange_price;
use mbl::market::{BarrierSpec, MarketSpec};
use mbl::mc::{price_barrier_mc, SimConfig};
use mbl::payoff::exchange_payoff;

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
    let t = 1.0;
    let g = exchange_payoff(1.0, 1.0)?;
    let bar = BarrierSpec::up_in(1.05);
    let closed = knockin_exchange_price(&m, 1.0, 1.0, 1.05, t)?.value;
    println!("closed form {closed:.6}");
    for bridge in [false, true] {
        for steps in [16, 64] {
            let cfg = SimConfig::new(20_000, steps, 11).with_bridge(bridge);
            let e = price_barrier_mc(&m, &g, &bar, t, &cfg)?;
            println!(
                "bridge={bridge:<5} steps={steps:>3}: {:.4} +- {:.4} (z = {:+.2}), hit {:.3}",
                e.value,
                e.std_error,
                (e.value - closed) / e.std_error,
                e.hit_fraction
            );
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> mbl::Result<()> {
    run_example()
}
