use serde_json::json;

use super::config::RunConfig;
use super::report::{num, Report};
use crate::analytic::{margrabe_price, price_barrier_closed_form, price_european, PricingMethod};
use crate::batch::{price_request, BatchRow, PriceRequest};
use crate::error::{Error, Result};
use crate::hedging::{
    build_hedge, describe_leg, foreign_decomposition, log_strike_grid, simplify_exchange_hedge, static_replicate,
    HedgePortfolio, LegPayoff,
};
use crate::market::{BarrierDirection, Knock};
use crate::mc::{price_barrier_mc, price_european_mc};
use crate::subordination::subordinated_symmetry_check;

fn row(id: &str, method: &str, value: f64, se: f64) -> BatchRow {
    BatchRow {
        id: id.to_string(),
        method: method.to_string(),
        value,
        std_error: se,
    }
}

/// Rows `id, method, value, std_error` for a list of priced claims.
pub fn rows_report(rows: &[BatchRow]) -> Report {
    let mut r = Report::new(&["id", "method", "value", "std_error"], serde_json::to_value(rows).unwrap_or_default());
    for x in rows {
        r.push(vec![x.id.clone(), x.method.clone(), num(x.value), num(x.std_error)]);
    }
    r
}

/// Closed form when available, Monte Carlo (or quadrature) otherwise. For
/// exchange claims with an up barrier, also prints the complementary claim,
/// the European price and the in/out parity residual.
pub fn cmd_price(cfg: &RunConfig) -> Result<Report> {
    cfg.validate()?;
    let m = &cfg.market;
    let t = cfg.claim.maturity;
    let g = cfg.payoff()?;
    let req = PriceRequest {
        id: "claim".into(),
        market: *m,
        payoff: cfg.claim.payoff.clone(),
        barrier: cfg.claim.barrier,
        maturity: t,
        sim: cfg.sim,
    };
    let main = price_request(&req)?;
    let mut rows = vec![main.clone()];
    match &cfg.claim.barrier {
        None if main.method == PricingMethod::Quadrature.as_str() => {
            let e = price_european_mc(m, &g, t, &cfg.sim_or_default())?;
            rows.push(row("claim", PricingMethod::MonteCarlo.as_str(), e.value, e.std_error));
        }
        Some(b) if g.as_exchange().is_some() && b.direction == BarrierDirection::Up => {
            let other = crate::market::BarrierSpec {
                knock: match b.knock {
                    Knock::In => Knock::Out,
                    Knock::Out => Knock::In,
                },
                ..*b
            };
            let comp = price_barrier_closed_form(m, &g, &other, t)?.value;
            let eur = price_european(m, &g, t)?.value;
            rows.push(row("complement", "closed_form", comp, 0.0));
            rows.push(row("european", "closed_form", eur, 0.0));
            rows.push(row("parity_residual", "check", main.value + comp - eur, 0.0));
        }
        _ => {}
    }
    Ok(rows_report(&rows))
}

/// Semi-static hedge of the configured barrier claim; optionally rewritten
/// in vanillas on the ratio (`foreign`) with power legs replaced by a
/// strike strip of `n_strikes` (`replicate`).
pub fn cmd_hedge(cfg: &RunConfig, foreign: bool, replicate: bool, n_strikes: usize) -> Result<Report> {
    cfg.validate()?;
    let m = &cfg.market;
    let t = cfg.claim.maturity;
    let g = cfg.payoff()?;
    let barrier = cfg
        .claim
        .barrier
        .ok_or_else(|| Error::InvalidConfig("hedging needs a barrier in claim.barrier".into()))?;
    let dual = m.dual()?;
    let mut p = match g.as_exchange() {
        Some((a, b)) if barrier.direction == BarrierDirection::Up => {
            simplify_exchange_hedge(a, b, barrier.level, &dual, barrier.knock)?
        }
        _ => build_hedge(&g, &barrier, &dual)?,
    };
    let mut replication = serde_json::Value::Null;
    if foreign || replicate {
        p = foreign_decomposition(&p, &dual)?;
    }
    if replicate {
        let (legs, info) = replicate_power_legs(&p, barrier.level, n_strikes)?;
        p = HedgePortfolio { legs, ..p };
        replication = info;
    }
    let values = p.leg_values(m, t)?;
    let total: f64 = values.iter().sum();
    let claim_value = match g.as_exchange() {
        Some(_) if barrier.direction == BarrierDirection::Up => Some(price_barrier_closed_form(m, &g, &barrier, t)?.value),
        _ => None,
    };

    let mut json = p.to_json();
    json["leg_values"] = json!(values);
    json["total_value"] = json!(total);
    json["claim_value"] = json!(claim_value);
    json["maturity"] = json!(t);
    json["replication"] = replication;
    let mut r = Report::new(
        &["leg", "market", "instrument", "strike", "quantity", "unit_value", "value"],
        json,
    );
    for (i, (leg, v)) in p.legs.iter().zip(&values).enumerate() {
        let (market, strike) = match &leg.payoff {
            LegPayoff::Domestic(_) => ("domestic", String::new()),
            LegPayoff::Foreign(f) => (
                "foreign",
                f.as_call().or(f.as_put()).map(num).unwrap_or_default(),
            ),
        };
        r.push(vec![
            i.to_string(),
            market.into(),
            describe_leg(leg),
            strike,
            num(leg.quantity),
            num(v / leg.quantity),
            num(*v),
        ]);
    }
    r.push(vec!["total".into(), String::new(), String::new(), String::new(), String::new(), String::new(), num(total)]);
    if let Some(c) = claim_value {
        r.push(vec!["claim".into(), String::new(), "closed form".into(), String::new(), String::new(), String::new(), num(c)]);
    }
    Ok(r)
}

fn replicate_power_legs(
    p: &HedgePortfolio,
    c: f64,
    n_strikes: usize,
) -> Result<(Vec<crate::hedging::HedgeLeg>, serde_json::Value)> {
    if n_strikes < 2 {
        return Err(Error::InvalidConfig("at least two strikes are needed".into()));
    }
    let grid = log_strike_grid(0.25 * c, 4.0 * c, n_strikes);
    let mut legs = Vec::new();
    let mut info = Vec::new();
    for leg in &p.legs {
        match &leg.payoff {
            LegPayoff::Foreign(f) if f.as_power_call().is_some() => {
                let kink = f.kinks().first().copied().unwrap_or(c).clamp(grid[0], grid[grid.len() - 1]);
                let rep = static_replicate(f, kink, &grid)?;
                info.push(json!({
                    "payoff": f.tag(),
                    "expansion_point": kink,
                    "strikes": rep.strikes.len(),
                    "max_relative_error": rep.max_relative_error,
                }));
                legs.extend(rep.legs(leg.quantity)?);
            }
            _ => legs.push(leg.clone()),
        }
    }
    Ok((legs, json!(info)))
}

/// Monte Carlo estimate of the configured claim; with a subordinator, also
/// the subordinated European estimates of the claim and its swapped twin.
pub fn cmd_simulate(cfg: &RunConfig) -> Result<Report> {
    cfg.validate()?;
    let m = &cfg.market;
    let t = cfg.claim.maturity;
    let g = cfg.payoff()?;
    let sim = cfg.sim_or_default();
    let est = match &cfg.claim.barrier {
        Some(b) => price_barrier_mc(m, &g, b, t, &sim)?,
        None => price_european_mc(m, &g, t, &sim)?,
    };
    let reference = match &cfg.claim.barrier {
        // No reference for weights outside the closed-form range.
        Some(b) if g.as_exchange().is_some() && b.direction == BarrierDirection::Up => {
            price_barrier_closed_form(m, &g, b, t).ok().map(|q| q.value)
        }
        None => match g.as_exchange() {
            Some((a, b)) => Some(margrabe_price(m, a, b, t)?.value),
            None => Some(price_european(m, &g, t)?.value),
        },
        _ => None,
    };
    let mut rows = vec![(
        "claim",
        est.value,
        est.std_error,
        est.hit_fraction,
        est.n_paths,
        sim.n_steps,
        sim.bridge_correction,
    )];
    let mut sub_json = serde_json::Value::Null;
    if let Some(sub) = &cfg.subordinator {
        let one = crate::mc::SimConfig { n_steps: 1, ..sim };
        let s = subordinated_symmetry_check(m, &g, sub, t, &one)?;
        rows.push(("subordinated", s.original.value, s.original.std_error, 0.0, s.original.n_paths, 1, false));
        rows.push(("subordinated_swapped", s.swapped.value, s.swapped.std_error, 0.0, s.swapped.n_paths, 1, false));
        sub_json = json!({"subordinator": sub, "symmetry": s});
    }
    let json = json!({
        "estimate": est,
        "sim": sim,
        "reference": reference,
        "z_score": reference.map(|r| if est.std_error > 0.0 { (est.value - r) / est.std_error } else { 0.0 }),
        "subordinated": sub_json,
    });
    let mut r = Report::new(
        &["claim_id", "estimate", "std_error", "hit_fraction", "n_paths", "n_steps", "bridge"],
        json,
    );
    for (id, v, se, h, n, k, bridge) in rows {
        r.push(vec![id.into(), num(v), num(se), num(h), n.to_string(), k.to_string(), bridge.to_string()]);
    }
    Ok(r)
}
