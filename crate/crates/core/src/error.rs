//! Error type shared by every module of the crate.

use thiserror::Error;

/// Errors raised while validating inputs or running a pricing/hedging routine.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid volatility: {field} = {value} (must be > 0)")]
    InvalidVolatility { field: &'static str, value: f64 },

    #[error("invalid correlation: rho = {value} (must satisfy |rho| < 1)")]
    InvalidCorrelation { value: f64 },

    #[error("invalid spot: {field} = {value} (must be > 0)")]
    InvalidSpot { field: &'static str, value: f64 },

    #[error("invalid rate: {field} = {value} (must be finite)")]
    InvalidRate { field: &'static str, value: f64 },

    #[error("degenerate dual volatility: tilde_sigma_sq = {value:e}")]
    DegenerateDualVolatility { value: f64 },

    #[error("maturity must be positive, got {value}")]
    NonpositiveMaturity { value: f64 },

    #[error("weight {field} = {value} is negative")]
    NegativeWeight { field: &'static str, value: f64 },

    #[error("invalid barrier: {reason}")]
    InvalidBarrier { reason: String },

    #[error("unsupported weights a = {a}, b = {b}, c = {c}: the closed form requires 0 < a <= b*c")]
    UnsupportedWeights { a: f64, b: f64, c: f64 },

    #[error("unsupported hedge leg: {0}")]
    UnsupportedLeg(String),

    #[error("invalid strike {value}")]
    InvalidStrike { value: f64 },

    #[error("strike grid too coarse: max relative reconstruction error {max_error:e} exceeds {tolerance:e}")]
    GridTooCoarse { max_error: f64, tolerance: f64 },

    #[error("simulation budget exceeded: {requested} path-steps requested, budget is {budget}")]
    BudgetExceeded { requested: u128, budget: u128 },

    #[error("quadrature failed for {what}: estimate {estimate:e}, error estimate {error_estimate:e} after {evaluations} evaluations")]
    QuadratureFailure {
        what: &'static str,
        estimate: f64,
        error_estimate: f64,
        evaluations: usize,
    },

    #[error("carrying costs differ (r1 = {r1}, r2 = {r2}); this experiment needs r1 == r2")]
    UnequalCarryingCosts { r1: f64, r2: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// `true` for errors caused by malformed user input, as opposed to
    /// numerical or I/O failures.
    pub fn is_input_error(&self) -> bool {
        !matches!(
            self,
            Error::QuadratureFailure { .. } | Error::Io(_) | Error::Csv(_)
        )
    }
}
