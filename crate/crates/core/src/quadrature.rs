//! Numerical integration: Gauss-Hermite expectations over a normal law and
//! an adaptive Gauss-Kronrod (7/15) integrator for finite intervals.

use std::collections::HashMap;
use std::num::NonZeroUsize;
use std::sync::{Arc, Mutex, OnceLock};

use gauss_quad::hermite::GaussHermite;

use crate::error::{Error, Result};

/// Nodes and weights for `E f(Z)`, `Z ~ N(0, 1)`.
#[derive(Debug, Clone)]
pub struct NormalRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl NormalRule {
    /// Gauss-Hermite rule with `n` nodes, rescaled to the standard normal.
    /// Rules are cached per size.
    pub fn gauss_hermite(n: usize) -> Arc<NormalRule> {
        static CACHE: OnceLock<Mutex<HashMap<usize, Arc<NormalRule>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut guard = cache.lock().expect("quadrature cache poisoned");
        guard
            .entry(n)
            .or_insert_with(|| {
                let rule = GaussHermite::new(NonZeroUsize::new(n.max(1)).unwrap());
                let scale = std::f64::consts::PI.sqrt().recip();
                let (nodes, weights) = rule
                    .iter()
                    .map(|(x, w)| (std::f64::consts::SQRT_2 * x, w * scale))
                    .unzip();
                Arc::new(NormalRule { nodes, weights })
            })
            .clone()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `E f(Z)` for a standard normal `Z`.
    pub fn expect<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .filter(|(_, w)| **w > 0.0)
            .map(|(x, w)| w * f(*x))
            .sum()
    }
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// One Gauss-Kronrod 15-point panel: (kronrod estimate, |kronrod - gauss|).
fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        kron += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    (kron * h, ((kron - gauss) * h).abs())
}

/// Tolerances for [`integrate_adaptive`].
#[derive(Debug, Clone, Copy)]
pub struct AdaptiveTolerance {
    pub rel: f64,
    pub abs: f64,
    pub max_panels: usize,
}

impl Default for AdaptiveTolerance {
    fn default() -> Self {
        Self {
            rel: 1e-10,
            abs: 1e-300,
            max_panels: 2000,
        }
    }
}

/// Globally adaptive Gauss-Kronrod integration of `f` over `[a, b]`.
///
/// The panel with the largest error estimate is bisected until the summed
/// error falls below `max(abs, rel * |integral|)`.
pub fn integrate_adaptive<F: FnMut(f64) -> f64>(
    what: &'static str,
    mut f: F,
    a: f64,
    b: f64,
    tol: AdaptiveTolerance,
) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let mut panels: Vec<(f64, f64, f64, f64)> = Vec::with_capacity(64);
    let (v, e) = gk15(&mut f, a, b);
    panels.push((a, b, v, e));
    let mut evaluations = 15;
    loop {
        let total: f64 = panels.iter().map(|p| p.2).sum();
        let err: f64 = panels.iter().map(|p| p.3).sum();
        if !total.is_finite() || !err.is_finite() {
            return Err(Error::QuadratureFailure {
                what,
                estimate: total,
                error_estimate: err,
                evaluations,
            });
        }
        if err <= tol.abs.max(tol.rel * total.abs()) {
            return Ok(total);
        }
        if panels.len() >= tol.max_panels {
            return Err(Error::QuadratureFailure {
                what,
                estimate: total,
                error_estimate: err,
                evaluations,
            });
        }
        let (idx, _) = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .expect("at least one panel");
        let (lo, hi, _, _) = panels.swap_remove(idx);
        let mid = 0.5 * (lo + hi);
        let (v1, e1) = gk15(&mut f, lo, mid);
        let (v2, e2) = gk15(&mut f, mid, hi);
        evaluations += 30;
        panels.push((lo, mid, v1, e1));
        panels.push((mid, hi, v2, e2));
    }
}

/// Integrates a function whose logarithm is available over the whole real
/// line, restricting the range to where `log_f` is within `drop` nats of
/// its peak. The peak is located on a coarse scan of `[lo, hi]`.
///
/// Used for integrands in `t = ln s` that are bell shaped but whose centre
/// moves over many orders of magnitude.
pub fn integrate_log_peaked<L, F>(
    what: &'static str,
    log_f: L,
    mut f: F,
    lo: f64,
    hi: f64,
    drop: f64,
    tol: AdaptiveTolerance,
) -> Result<f64>
where
    L: Fn(f64) -> f64,
    F: FnMut(f64) -> f64,
{
    const SCAN: usize = 400;
    let step = (hi - lo) / SCAN as f64;
    let mut best = f64::NEG_INFINITY;
    let mut best_i = 0;
    let values: Vec<f64> = (0..=SCAN).map(|i| log_f(lo + step * i as f64)).collect();
    for (i, v) in values.iter().enumerate() {
        if *v > best {
            best = *v;
            best_i = i;
        }
    }
    if best == f64::NEG_INFINITY {
        return Ok(0.0);
    }
    let cutoff = best - drop;
    let mut left = best_i;
    while left > 0 && values[left] > cutoff {
        left -= 1;
    }
    let mut right = best_i;
    while right < SCAN && values[right] > cutoff {
        right += 1;
    }
    let a = lo + step * left as f64;
    let b = lo + step * right as f64;
    // Split at the peak so both flanks get their own panels from the start.
    let peak = lo + step * best_i as f64;
    let mut sub = |x: f64, y: f64| integrate_adaptive(what, &mut f, x, y, tol);
    if peak > a && peak < b {
        Ok(sub(a, peak)? + sub(peak, b)?)
    } else {
        sub(a, b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hermite_moments() {
        let rule = NormalRule::gauss_hermite(40);
        assert!((rule.expect(|_| 1.0) - 1.0).abs() < 1e-14);
        assert!((rule.expect(|z| z * z) - 1.0).abs() < 1e-13);
        assert!((rule.expect(|z| z.powi(4)) - 3.0).abs() < 1e-12);
        // E exp(sZ) = exp(s^2/2)
        assert!((rule.expect(|z| (0.3 * z).exp()) - (0.045f64).exp()).abs() < 1e-14);
    }

    #[test]
    fn large_rule_is_usable() {
        let rule = NormalRule::gauss_hermite(501);
        assert_eq!(rule.len(), 501);
        assert!((rule.expect(|_| 1.0) - 1.0).abs() < 1e-12);
        assert!((rule.expect(|z| (0.5 * z).exp()) - (0.125f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn adaptive_handles_endpoint_singularity() {
        // int_0^1 1/sqrt(x) dx = 2
        let v = integrate_adaptive(
            "test",
            |x| 1.0 / x.sqrt(),
            0.0,
            1.0,
            AdaptiveTolerance {
                rel: 1e-10,
                ..Default::default()
            },
        )
        .unwrap();
        assert!((v - 2.0).abs() < 1e-8);
    }

    #[test]
    fn log_peaked_gaussian() {
        let f = |t: f64| (-(t - 3.0) * (t - 3.0) / 0.02).exp();
        let v = integrate_log_peaked(
            "test",
            |t| -(t - 3.0) * (t - 3.0) / 0.02,
            f,
            -30.0,
            30.0,
            60.0,
            AdaptiveTolerance::default(),
        )
        .unwrap();
        let exact = (std::f64::consts::PI * 0.02).sqrt();
        assert!((v / exact - 1.0).abs() < 1e-10);
    }
}
