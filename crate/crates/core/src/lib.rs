//! Pricing and semi-static hedging of exchange options with barriers on the
//! price ratio `S2 / S1` in a bivariate Black-Scholes market, together with
//! Monte Carlo verification and Lévy extensions built by Brownian
//! subordination.

pub mod analytic;
pub mod batch;
pub mod cli;
pub mod error;
pub mod hedging;
pub mod market;
pub mod mc;
pub mod payoff;
pub mod quadrature;
pub mod subordination;

pub use error::{Error, Result};
