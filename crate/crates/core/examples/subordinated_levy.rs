//! Variance-gamma driver by gamma subordination: Levy density, the drift
//! vector two ways, martingale closure and the exponent-swap symmetry.

use mbl::market::MarketSpec;
use mbl::mc::SimConfig;
use mbl::payoff::exchange_payoff;
use mbl::subordination::{
    bivariate_triplet, dual_ratio_levy_density, gamma_vector, subordinated_symmetry_check, BrownianDriver,
    SubordinatorSpec,
};
use num_complex::Complex64;

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
    let sub = SubordinatorSpec::gamma(0.2);
    let driver = BrownianDriver::from_market(&m);

    for y in [0.05, 0.2, 0.5] {
        let p = dual_ratio_levy_density(y, &driver, &sub)?;
        let q = dual_ratio_levy_density(-y, &driver, &sub)?;
        println!("nu~({y}) = {p:.6e}, e^y nu~(y) / nu~(-y) = {:.12}", p * f64::exp(y) / q);
    }

    let g = gamma_vector(&driver, &sub)?;
    println!("gamma direct {:?}\ngamma martingale {:?}", g.direct, g.martingale);

    let tri = bivariate_triplet(&driver, &sub)?;
    let z = Complex64::new(0.0, 0.0);
    let mi = Complex64::new(0.0, -1.0);
    println!(
        "psi(-i e1) = {:.2e}, psi(-i e2) = {:.2e}",
        tri.characteristic_exponent([mi, z])?.norm(),
        tri.characteristic_exponent([z, mi])?.norm()
    );

    let s = subordinated_symmetry_check(&m, &exchange_payoff(1.0, 1.0)?, &sub, 1.0, &SimConfig::new(20_000, 1, 3))?;
    println!(
        "exchange {:.4} vs swapped {:.4}, diff {:+.4} (se {:.4})",
        s.original.value, s.swapped.value, s.difference, s.combined_se
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> mbl::Result<()> {
    run_example()
}
