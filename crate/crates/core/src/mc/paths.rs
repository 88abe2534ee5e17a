use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use super::{par_chunks, Moments, PriceEstimate, SimConfig};
use crate::error::{Error, Result};
use crate::market::{check_maturity, MarketSpec};
use crate::payoff::HomogeneousPayoff;

/// Largest number of ratio values [`simulate_paths`] will keep in memory.
pub const MAX_STORED_VALUES: u128 = 1 << 27;

/// Exact log-normal stepping on a uniform grid.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Stepper {
    pub x1_0: f64,
    pub x2_0: f64,
    pub dt: f64,
    d1: f64,
    d2: f64,
    a11: f64,
    a21: f64,
    a22: f64,
}

impl Stepper {
    pub fn new(m: &MarketSpec, t: f64, n_steps: usize) -> Self {
        let dt = t / n_steps as f64;
        let h = dt.sqrt();
        Self {
            x1_0: m.s01.ln(),
            x2_0: m.s02.ln(),
            dt,
            d1: (m.lambda1() - 0.5 * m.sigma1 * m.sigma1) * dt,
            d2: (m.lambda2() - 0.5 * m.sigma2 * m.sigma2) * dt,
            a11: m.sigma1 * h,
            a21: m.rho * m.sigma2 * h,
            a22: m.sigma2 * (1.0 - m.rho * m.rho).sqrt() * h,
        }
    }

    /// One step of `(ln S1, ln S2)` driven by independent normals.
    #[inline(always)]
    pub fn step(&self, x1: &mut f64, x2: &mut f64, z1: f64, z2: f64) {
        *x1 += self.d1 + self.a11 * z1;
        *x2 += self.d2 + self.a21 * z1 + self.a22 * z2;
    }
}

#[inline]
pub(crate) fn fill_normals(rng: &mut ChaCha8Rng, buf: &mut [f64]) {
    for z in buf.iter_mut() {
        *z = rng.sample(StandardNormal);
    }
}

/// Simulated paths kept in memory.
#[derive(Debug, Clone, Serialize)]
pub struct PathBatch {
    pub n_paths: usize,
    pub n_steps: usize,
    pub maturity: f64,
    /// Terminal `(S_T1, S_T2)` per path.
    pub terminal: Vec<[f64; 2]>,
    /// Ratio `S2 / S1` on the grid `0, dt, ..., T`, path after path.
    pub ratios: Vec<f64>,
}

impl PathBatch {
    pub fn ratio_path(&self, i: usize) -> &[f64] {
        let w = self.n_steps + 1;
        &self.ratios[i * w..(i + 1) * w]
    }

    /// Sample mean and standard error of `e^{-lambda_i T} S_Ti / S_0i`.
    pub fn martingale_check(&self, m: &MarketSpec) -> [(f64, f64); 2] {
        let mut out = [(0.0, 0.0); 2];
        let scale = [
            (-m.lambda1() * self.maturity).exp() / m.s01,
            (-m.lambda2() * self.maturity).exp() / m.s02,
        ];
        for (i, o) in out.iter_mut().enumerate() {
            let mut mo = Moments::default();
            self.terminal.iter().for_each(|s| mo.push(s[i] * scale[i]));
            *o = (mo.mean, mo.std_error());
        }
        out
    }
}

/// Simulates and stores `cfg.n_paths` paths with `cfg.n_steps` exact steps.
/// With `antithetic`, consecutive paths are mirror images.
pub fn simulate_paths(m: &MarketSpec, t: f64, cfg: &SimConfig) -> Result<PathBatch> {
    m.validate()?;
    check_maturity(t)?;
    cfg.validate()?;
    check_antithetic(cfg)?;
    let stored = cfg.n_paths as u128 * (cfg.n_steps as u128 + 1);
    if stored > MAX_STORED_VALUES {
        return Err(Error::BudgetExceeded {
            requested: stored,
            budget: MAX_STORED_VALUES,
        });
    }
    let n = cfg.n_steps as usize;
    let st = Stepper::new(m, t, n);
    let chunks = par_chunks(cfg.seed, cfg.n_paths, |_, paths, rng| {
        let mut z = vec![0.0; 2 * n];
        let mut term = Vec::with_capacity(paths as usize);
        let mut ratios = Vec::with_capacity(paths as usize * (n + 1));
        let mut i = 0;
        while i < paths {
            fill_normals(rng, &mut z);
            let signs: &[f64] = if cfg.antithetic { &[1.0, -1.0] } else { &[1.0] };
            for &s in signs {
                let (mut x1, mut x2) = (st.x1_0, st.x2_0);
                ratios.push((x2 - x1).exp());
                for k in 0..n {
                    st.step(&mut x1, &mut x2, s * z[2 * k], s * z[2 * k + 1]);
                    ratios.push((x2 - x1).exp());
                }
                term.push([x1.exp(), x2.exp()]);
                i += 1;
            }
        }
        (term, ratios)
    });
    let mut terminal = Vec::with_capacity(cfg.n_paths as usize);
    let mut ratios = Vec::with_capacity(stored as usize);
    for (t_, r_) in chunks {
        terminal.extend(t_);
        ratios.extend(r_);
    }
    Ok(PathBatch {
        n_paths: cfg.n_paths as usize,
        n_steps: n,
        maturity: t,
        terminal,
        ratios,
    })
}

pub(crate) fn check_antithetic(cfg: &SimConfig) -> Result<()> {
    if cfg.antithetic && !cfg.n_paths.is_multiple_of(2) {
        return Err(Error::InvalidConfig(
            "antithetic sampling needs an even number of paths".into(),
        ));
    }
    Ok(())
}

/// Monte Carlo price of the European claim `g(S_T1, S_T2)`, sampled exactly
/// at maturity (the step count is irrelevant and ignored).
pub fn price_european_mc(m: &MarketSpec, g: &HomogeneousPayoff, t: f64, cfg: &SimConfig) -> Result<PriceEstimate> {
    m.validate()?;
    check_maturity(t)?;
    cfg.validate()?;
    check_antithetic(cfg)?;
    let st = Stepper::new(m, t, 1);
    let disc = (-m.r * t).exp();
    let parts = par_chunks(cfg.seed, cfg.n_paths, |_, paths, rng| {
        let mut mo = Moments::default();
        let mut z = [0.0; 2];
        let value = |s: f64, z: &[f64; 2]| {
            let (mut x1, mut x2) = (st.x1_0, st.x2_0);
            st.step(&mut x1, &mut x2, s * z[0], s * z[1]);
            disc * g.eval(x1.exp(), x2.exp())
        };
        if cfg.antithetic {
            for _ in 0..paths / 2 {
                fill_normals(rng, &mut z);
                mo.push(0.5 * (value(1.0, &z) + value(-1.0, &z)));
            }
        } else {
            for _ in 0..paths {
                fill_normals(rng, &mut z);
                mo.push(value(1.0, &z));
            }
        }
        mo
    });
    let mo = Moments::combine(&parts);
    Ok(PriceEstimate {
        value: mo.mean,
        std_error: mo.std_error(),
        n_paths: cfg.n_paths,
        hit_fraction: 0.0,
    })
}
