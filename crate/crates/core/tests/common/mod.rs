#![allow(dead_code)]

use std::num::NonZeroUsize;

use gauss_quad::hermite::GaussHermite;
use gauss_quad::legendre::GaussLegendre;
use mbl::market::MarketSpec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn m_star() -> MarketSpec {
    MarketSpec {
        s01: 100.0,
        s02: 95.0,
        sigma1: 0.2,
        sigma2: 0.3,
        rho: 0.5,
        r: 0.05,
        r1: 0.02,
        r2: 0.01,
    }
}

/// Knock-in closed form on the reference market with a = b = 1, c = 1.05, T = 1.
pub const M_STAR_KNOCKIN: f64 = 4.385015238537431;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_market(rng: &mut ChaCha8Rng) -> MarketSpec {
    let s01 = rng.gen_range(20.0..200.0);
    MarketSpec {
        s01,
        s02: s01 * rng.gen_range(0.6..1.4),
        sigma1: rng.gen_range(0.05..0.7),
        sigma2: rng.gen_range(0.05..0.7),
        rho: rng.gen_range(-0.95..0.95),
        r: rng.gen_range(0.0..0.1),
        r1: rng.gen_range(0.0..0.1),
        r2: rng.gen_range(0.0..0.1),
    }
}

/// Market, weights `0 < a <= b c`, up barrier `c` above spot, maturity.
pub struct Draw {
    pub m: MarketSpec,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub t: f64,
}

pub fn random_draw(rng: &mut ChaCha8Rng) -> Draw {
    let m = random_market(rng);
    let c = m.s02 / m.s01 * rng.gen_range(1.001..1.6);
    let b = rng.gen_range(0.3..3.0);
    let a = b * c * rng.gen_range(0.1..1.0);
    Draw {
        m,
        a,
        b,
        c,
        t: rng.gen_range(0.05..5.0),
    }
}

/// `e^{-rT} E g(S_T1, S_T2)` by two-dimensional quadrature under the
/// domestic measure. The log ratio `W` is integrated with composite
/// Gauss-Legendre split at `kink` (a ratio level where `g` is not smooth);
/// the independent component with Gauss-Hermite.
pub fn oracle_price<G: Fn(f64, f64) -> f64>(m: &MarketSpec, t: f64, kink: Option<f64>, g: G) -> f64 {
    let gh = GaussHermite::new(NonZeroUsize::new(96).unwrap());
    let gl = GaussLegendre::new(NonZeroUsize::new(20).unwrap());
    let f1 = m.s01 * ((m.r - m.r1) * t).exp();
    let f2 = m.s02 * ((m.r - m.r2) * t).exp();
    let v1 = m.sigma1 * m.sigma1 * t;
    let v2 = m.sigma2 * m.sigma2 * t;
    let c12 = m.rho * m.sigma1 * m.sigma2 * t;
    let vd = v1 + v2 - 2.0 * c12;
    let sd = vd.sqrt();
    // xi1 = beta W + s_perp V with W = (xi2 - xi1) / sd.
    let beta = (c12 - v1) / sd;
    let s_perp = (v1 - beta * beta).max(0.0).sqrt();
    let w_star = kink.map(|k| ((k * f1 / f2).ln() + 0.5 * (v2 - v1)) / sd);

    const W_MAX: f64 = 14.0;
    let mut cuts = vec![-W_MAX, W_MAX];
    if let Some(w) = w_star.filter(|w| w.abs() < W_MAX) {
        cuts.push(w);
    }
    cuts.sort_by(f64::total_cmp);
    let norm = (2.0 * std::f64::consts::PI).sqrt().recip();

    let inner = |v: f64| {
        let mut acc = 0.0;
        for seg in cuts.windows(2) {
            let n = ((seg[1] - seg[0]) / 0.25).ceil().max(1.0) as usize;
            let h = (seg[1] - seg[0]) / n as f64;
            for p in 0..n {
                let lo = seg[0] + p as f64 * h;
                acc += gl.integrate(lo, lo + h, |w| {
                    let xi1 = beta * w + s_perp * v;
                    let xi2 = xi1 + sd * w;
                    let x = f1 * (xi1 - 0.5 * v1).exp();
                    let y = f2 * (xi2 - 0.5 * v2).exp();
                    g(x, y) * norm * (-0.5 * w * w).exp()
                });
            }
        }
        acc
    };
    let total: f64 = gh
        .iter()
        .map(|(x, wt)| wt * inner(std::f64::consts::SQRT_2 * x))
        .sum::<f64>()
        / std::f64::consts::PI.sqrt();
    (-m.r * t).exp() * total
}

pub fn oracle_exchange(m: &MarketSpec, a: f64, b: f64, t: f64) -> f64 {
    oracle_price(m, t, Some(a / b), |x, y| (a * x - b * y).max(0.0))
}

pub fn oracle_power_exchange(m: &MarketSpec, a: f64, b: f64, c: f64, beta: f64, t: f64) -> f64 {
    oracle_price(m, t, Some(b * c * c / a), |x, y| {
        (y / (c * x)).powf(beta) * (a * y / c - b * c * x).max(0.0)
    })
}

/// `beta = 2 (r2 - r1) / sigma~^2`.
pub fn beta_of(m: &MarketSpec) -> f64 {
    let v = m.sigma1 * m.sigma1 + m.sigma2 * m.sigma2 - 2.0 * m.rho * m.sigma1 * m.sigma2;
    2.0 * (m.r2 - m.r1) / v
}

/// Variance-gamma Levy density of a one-dimensional driver `theta s + sigma W_s`
/// time-changed by a gamma clock with variance rate `kappa`.
pub fn vg_levy_density(y: f64, theta: f64, sigma_sq: f64, kappa: f64) -> f64 {
    let a = (theta * theta + 2.0 * sigma_sq / kappa).sqrt();
    (theta * y / sigma_sq - y.abs() * a / sigma_sq).exp() / (kappa * y.abs())
}

/// The same density from its mixture integral by a fine trapezoid in `ln s`.
pub fn vg_levy_density_trapezoid(y: f64, theta: f64, sigma_sq: f64, kappa: f64) -> f64 {
    let (lo, hi, n) = (-40.0f64, 6.0f64, 400_000);
    let h = (hi - lo) / n as f64;
    let mut acc = 0.0;
    for i in 0..=n {
        let s = (lo + i as f64 * h).exp();
        let dens = (-(y - theta * s).powi(2) / (2.0 * sigma_sq * s)).exp() / (2.0 * std::f64::consts::PI * sigma_sq * s).sqrt();
        let rho = (-s / kappa).exp() / kappa;
        let w = if i == 0 || i == n { 0.5 } else { 1.0 };
        acc += w * rho * dens;
    }
    acc * h
}

pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / std::f64::consts::SQRT_2)
}

/// Kolmogorov-Smirnov statistic of `sample` against the `N(mean, sd^2)` law.
pub fn ks_normal(sample: &mut [f64], mean: f64, sd: f64) -> f64 {
    sample.sort_by(f64::total_cmp);
    let n = sample.len() as f64;
    sample
        .iter()
        .enumerate()
        .map(|(i, x)| {
            let f = normal_cdf((x - mean) / sd);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}
