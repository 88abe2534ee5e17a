//! Pricing many claims from one JSON document.
//!
//! ```json
//! [
//!   {"id": "x1", "market": {...}, "payoff": {"kind": "exchange", "params": {"a": 1, "b": 1}}, "maturity": 1.0},
//!   {"id": "x2", "market": {...}, "payoff": {...}, "barrier": {"level": 1.05, "direction": "up", "knock": "in"}, "maturity": 1.0}
//! ]
//! ```
//!
//! Closed forms are used where they exist; other claims go to quadrature
//! (European) or Monte Carlo (barrier), using the request's `sim` section or
//! [`default_sim`].

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::analytic::{price_barrier_closed_form, price_european, PricingMethod};
use crate::error::{Error, Result};
use crate::market::{check_maturity, BarrierDirection, BarrierSpec, MarketSpec};
use crate::mc::{price_barrier_mc, SimConfig};
use crate::payoff::{HomogeneousPayoff, PayoffMetadata};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PriceRequest {
    pub id: String,
    pub market: MarketSpec,
    pub payoff: PayoffMetadata,
    #[serde(default)]
    pub barrier: Option<BarrierSpec>,
    pub maturity: f64,
    #[serde(default)]
    pub sim: Option<SimConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchRow {
    pub id: String,
    pub method: String,
    pub value: f64,
    pub std_error: f64,
}

/// Monte Carlo settings used when a request has none.
pub fn default_sim() -> SimConfig {
    SimConfig::new(100_000, 256, 0).with_bridge(true)
}

fn has_closed_barrier_form(g: &HomogeneousPayoff, b: &BarrierSpec) -> bool {
    g.as_exchange().is_some() && b.direction == BarrierDirection::Up
}

/// Prices one request.
pub fn price_request(req: &PriceRequest) -> Result<BatchRow> {
    req.market.validate()?;
    check_maturity(req.maturity)?;
    let g = HomogeneousPayoff::from_metadata(&req.payoff)?;
    let (method, value, std_error) = match &req.barrier {
        None => {
            let q = price_european(&req.market, &g, req.maturity)?;
            (q.method, q.value, q.std_error)
        }
        Some(b) => {
            b.validate_against(req.market.spot_ratio())?;
            if has_closed_barrier_form(&g, b) {
                let q = price_barrier_closed_form(&req.market, &g, b, req.maturity)?;
                (q.method, q.value, q.std_error)
            } else {
                let cfg = req.sim.unwrap_or_else(default_sim);
                let e = price_barrier_mc(&req.market, &g, b, req.maturity, &cfg)?;
                (PricingMethod::MonteCarlo, e.value, e.std_error)
            }
        }
    };
    Ok(BatchRow {
        id: req.id.clone(),
        method: method.as_str().to_string(),
        value,
        std_error,
    })
}

/// Prices all requests in order; the first failure aborts the batch and
/// names the offending request.
pub fn price_batch(reqs: &[PriceRequest]) -> Result<Vec<BatchRow>> {
    reqs.iter()
        .map(|r| {
            price_request(r).map_err(|e| match e {
                e if e.is_input_error() => Error::InvalidConfig(format!("request '{}': {e}", r.id)),
                e => e,
            })
        })
        .collect()
}

pub fn parse_batch(json: &str) -> Result<Vec<PriceRequest>> {
    Ok(serde_json::from_str(json)?)
}

/// Writes `id,method,value,std_error` rows.
pub fn write_csv<W: Write>(rows: &[BatchRow], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for r in rows {
        out.serialize(r)?;
    }
    out.flush()?;
    Ok(())
}
