use super::paths::{check_antithetic, fill_normals, Stepper};
use super::{par_chunks, Moments, PriceEstimate, SimConfig};
use crate::error::Result;
use crate::market::{check_maturity, dual_parameters, BarrierSpec, DualMarketSpec, Knock, MarketSpec};
use crate::payoff::HomogeneousPayoff;

/// Exponents below this give crossing probabilities under 1e-17.
const NEGLIGIBLE_EXPONENT: f64 = -40.0;

/// Probability that the ratio, a geometric Brownian motion with log-variance
/// `sigma_sq` per unit time, touches the barrier between two grid values
/// `dt` apart. Equal to 1 if either end point is on or beyond the barrier.
pub fn bridge_crossing_probability(r0: f64, r1: f64, barrier: &BarrierSpec, sigma_sq: f64, dt: f64) -> f64 {
    if barrier.is_breached(r0) || barrier.is_breached(r1) {
        return 1.0;
    }
    let c = barrier.level;
    (-2.0 * (c / r0).ln() * (c / r1).ln() / (sigma_sq * dt)).exp()
}

/// Hit indicator of a ratio path sampled every `dt`. With `bridge` the
/// per-step crossing probabilities are combined into the probability that
/// the continuous path touched the barrier.
pub fn barrier_hit(ratio_path: &[f64], barrier: &BarrierSpec, dual: &DualMarketSpec, dt: f64, bridge: bool) -> f64 {
    if ratio_path.iter().any(|r| barrier.is_breached(*r)) {
        return 1.0;
    }
    if !bridge {
        return 0.0;
    }
    let survive: f64 = ratio_path
        .windows(2)
        .map(|w| 1.0 - bridge_crossing_probability(w[0], w[1], barrier, dual.tilde_sigma_sq, dt))
        .product();
    1.0 - survive
}

/// Streaming barrier monitor in log-ratio coordinates.
#[derive(Debug, Clone, Copy)]
pub(crate) struct LogBarrier {
    level: f64,
    up: bool,
    scale: f64,
    bridge: bool,
}

impl LogBarrier {
    pub fn new(barrier: &BarrierSpec, sigma_sq: f64, dt: f64, bridge: bool) -> Self {
        Self {
            level: barrier.level.ln(),
            up: barrier.direction == crate::market::BarrierDirection::Up,
            scale: -2.0 / (sigma_sq * dt),
            bridge,
        }
    }

    #[inline(always)]
    pub fn breached(&self, l: f64) -> bool {
        if self.up {
            l >= self.level
        } else {
            l <= self.level
        }
    }

    /// Multiplies `survive` by the no-crossing probability of the step
    /// `l0 -> l1`, both strictly inside.
    #[inline(always)]
    pub fn update_survival(&self, l0: f64, l1: f64, survive: &mut f64) {
        if self.bridge {
            let e = self.scale * (self.level - l0) * (self.level - l1);
            if e > NEGLIGIBLE_EXPONENT {
                *survive *= 1.0 - e.exp();
            }
        }
    }
}

/// Monte Carlo price of `g(S_T1, S_T2)` with a knock-in or knock-out
/// condition on the ratio. Knock-out uses the complementary weight.
pub fn price_barrier_mc(
    m: &MarketSpec,
    g: &HomogeneousPayoff,
    barrier: &BarrierSpec,
    t: f64,
    cfg: &SimConfig,
) -> Result<PriceEstimate> {
    m.validate()?;
    check_maturity(t)?;
    barrier.validate_against(m.spot_ratio())?;
    cfg.validate()?;
    check_antithetic(cfg)?;
    let dual = dual_parameters(m)?;
    let n = cfg.n_steps as usize;
    let st = Stepper::new(m, t, n);
    let mon = LogBarrier::new(barrier, dual.tilde_sigma_sq, st.dt, cfg.bridge_correction);
    let disc = (-m.r * t).exp();
    let knock_in = barrier.knock == Knock::In;

    let path = |s: f64, z: &[f64]| -> (f64, f64) {
        let (mut x1, mut x2) = (st.x1_0, st.x2_0);
        let mut l = x2 - x1;
        let mut hit = false;
        let mut survive = 1.0;
        for k in 0..n {
            st.step(&mut x1, &mut x2, s * z[2 * k], s * z[2 * k + 1]);
            if !hit {
                let l1 = x2 - x1;
                if mon.breached(l1) {
                    hit = true;
                } else {
                    mon.update_survival(l, l1, &mut survive);
                }
                l = l1;
            }
        }
        let p_hit = if hit { 1.0 } else { 1.0 - survive };
        let w = if knock_in { p_hit } else { 1.0 - p_hit };
        let v = if w == 0.0 { 0.0 } else { disc * w * g.eval(x1.exp(), x2.exp()) };
        (v, p_hit)
    };

    let parts = par_chunks(cfg.seed, cfg.n_paths, |_, paths, rng| {
        let mut z = vec![0.0; 2 * n];
        let mut mo = Moments::default();
        let mut hits = 0.0;
        if cfg.antithetic {
            for _ in 0..paths / 2 {
                fill_normals(rng, &mut z);
                let (v1, h1) = path(1.0, &z);
                let (v2, h2) = path(-1.0, &z);
                mo.push(0.5 * (v1 + v2));
                hits += h1 + h2;
            }
        } else {
            for _ in 0..paths {
                fill_normals(rng, &mut z);
                let (v, h) = path(1.0, &z);
                mo.push(v);
                hits += h;
            }
        }
        (mo, hits)
    });
    let mo = Moments::combine(&parts.iter().map(|p| p.0).collect::<Vec<_>>());
    let hits: f64 = parts.iter().map(|p| p.1).sum();
    Ok(PriceEstimate {
        value: mo.mean,
        std_error: mo.std_error(),
        n_paths: cfg.n_paths,
        hit_fraction: (hits / cfg.n_paths as f64).clamp(0.0, 1.0),
    })
}
