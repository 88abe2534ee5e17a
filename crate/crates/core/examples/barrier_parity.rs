//! Up-and-in / up-and-out exchange options on the ratio barrier `c` add up
//! to the European claim. Also scans a few barrier levels.

use mbl::analytic::{knockin_exchange_price, knockout_exchange_price, margrabe_price};
use mbl::market::MarketSpec;

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
    let european = margrabe_price(&m, a, b, t)?.value;
    println!("{:>6}  {:>12}  {:>12}  {:>10}", "c", "knock-in", "knock-out", "residual");
    for c in [1.0, 1.05, 1.1, 1.2, 1.5] {
        let ki = knockin_exchange_price(&m, a, b, c, t)?.value;
        let ko = knockout_exchange_price(&m, a, b, c, t)?.value;
        let resid = ki + ko - european;
        println!("{c:>6.2}  {ki:>12.8}  {ko:>12.8}  {resid:>10.2e}");
        assert!(resid.abs() < 1e-10);
    }
    println!("european {european:.8}");
    Ok(())
}

#[allow(dead_code)]
fn main() -> mbl::Result<()> {
    run_example()
}
