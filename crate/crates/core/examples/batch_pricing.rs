//! Prices a JSON array of requests and writes CSV, as `mbl price` does for
//! a request-array config.

use mbl::batch::{parse_batch, price_batch, write_csv};

const REQUESTS: &str = r#"[
  {"id": "european", "maturity": 1.0,
   "market": {"s01": 100, "s02": 95, "sigma1": 0.2, "sigma2": 0.3, "rho": 0.5, "r": 0.05, "r1": 0.02, "r2": 0.01},
   "payoff": {"kind": "exchange", "params": {"a": 1, "b": 1}}},
  {"id": "up_in", "maturity": 1.0,
   "market": {"s01": 100, "s02": 95, "sigma1": 0.2, "sigma2": 0.3, "rho": 0.5, "r": 0.05, "r1": 0.02, "r2": 0.01},
   "payoff": {"kind": "exchange", "params": {"a": 1, "b": 1}},
   "barrier": {"level": 1.05, "direction": "up", "knock": "in"}},
  {"id": "max_down_out", "maturity": 0.5,
   "market": {"s01": 100, "s02": 95, "sigma1": 0.2, "sigma2": 0.3, "rho": 0.5, "r": 0.05, "r1": 0.02, "r2": 0.01},
   "payoff": {"kind": "custom", "params": {"name": "max"}},
   "barrier": {"level": 0.9, "direction": "down", "knock": "out"},
   "sim": {"n_paths": 10000, "n_steps": 64, "seed": 7, "bridge_correction": true}}
]"#;

pub fn run_example() -> mbl::Result<()> {
    let rows = price_batch(&parse_batch(REQUESTS)?)?;
    let mut out = Vec::new();
    write_csv(&rows, &mut out)?;
    print!("{}", String::from_utf8_lossy(&out));
    Ok(())
}

#[allow(dead_code)]
fn main() -> mbl::Result<()> {
    run_example()
}
