//! Semi-static hedges: the general two-leg construction for any homogeneous
//! payoff, and the one-leg reduction for exchange options.

use mbl::analytic::knockin_exchange_price;
use mbl::hedging::{build_hedge, describe_leg, simplify_exchange_hedge};
use mbl::market::{BarrierSpec, Knock, MarketSpec};
use mbl::payoff::{exchange_payoff, HomogeneousPayoff};

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
    let t = 1.0;
    let c = 1.05;

    let reduced = simplify_exchange_hedge(1.0, 1.0, c, &dual, Knock::In)?;
    let general = build_hedge(&exchange_payoff(1.0, 1.0)?, &BarrierSpec::up_in(c), &dual)?;
    let closed = knockin_exchange_price(&m, 1.0, 1.0, c, t)?.value;
    println!("up-and-in exchange, c = {c}: closed form {closed:.10}");
    for (name, p) in [("reduced", &reduced), ("general", &general)] {
        println!("{name} hedge, value {:.10}", p.value(&m, t)?);
        for leg in &p.legs {
            println!("  {:+} x {}", leg.quantity, describe_leg(leg));
        }
    }

    // Payoffs without a closed form get the same construction.
    let max_hedge = build_hedge(&HomogeneousPayoff::max(), &BarrierSpec::down_out(0.9), &dual)?;
    println!("down-and-out max(S1, S2), c = 0.9: hedge value {:.6}", max_hedge.value(&m, t)?);
    Ok(())
}

#[allow(dead_code)]
fn main() -> mbl::Result<()> {
    run_example()
}
