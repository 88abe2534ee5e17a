use std::cell::Cell;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use super::{BrownianDriver, SubordinatorSpec};
use crate::error::{Error, Result};
use crate::market::{normal_cdf, normal_pdf};
use crate::quadrature::{integrate_adaptive, AdaptiveTolerance};

/// Angular nodes of the polar rule (trapezoidal, spectrally accurate for
/// smooth periodic integrands).
const N_THETA: usize = 256;
/// Nats below the peak at which the integrands are truncated.
const TRUNCATION: f64 = 100.0;

const DENSITY_TOL: AdaptiveTolerance = AdaptiveTolerance {
    rel: 1e-11,
    abs: 0.0,
    max_panels: 4000,
};

const PLANE_TOL: AdaptiveTolerance = AdaptiveTolerance {
    rel: 1e-10,
    abs: 1e-15,
    max_panels: 4000,
};

/// Gaussian mixture `int p_s(x) rho(ds)` for a gamma clock, where `p_s`
/// is the normal density with mean `s mu` and covariance `s Sigma` in `dim`
/// dimensions, described through `q = x' Sigma^-1 x`, `l = x' Sigma^-1 mu`,
/// `c = mu' Sigma^-1 mu` and `ln det Sigma`.
struct Mixture {
    q: f64,
    l: f64,
    c: f64,
    dim: f64,
    log_det: f64,
    kappa: f64,
}

impl Mixture {
    fn density(&self, what: &'static str) -> Result<f64> {
        let g = 0.5 * self.c + 1.0 / self.kappa;
        let h = 0.5 * self.dim;
        let q = self.q;
        // stationary point of the integrand in t = ln s
        let s_star = q / (h + (h * h + 2.0 * g * q).sqrt());
        let log_f = |s: f64| {
            -q / (2.0 * s) + self.l - 0.5 * s * self.c - h * (2.0 * PI * s).ln() - 0.5 * self.log_det - s / self.kappa
                - self.kappa.ln()
        };
        let peak = log_f(s_star);
        let s_lo = q / (2.0 * (TRUNCATION + q / (2.0 * s_star)));
        let s_hi = s_star + TRUNCATION / g;
        let f = |t: f64| (log_f(t.exp()) - peak).exp();
        let t_star = s_star.ln();
        let left = integrate_adaptive(what, f, s_lo.ln(), t_star, DENSITY_TOL)?;
        let right = integrate_adaptive(what, f, t_star, s_hi.ln(), DENSITY_TOL)?;
        Ok((left + right) * peak.exp())
    }
}

fn quad(m: &[[f64; 2]; 2], x: [f64; 2], y: [f64; 2]) -> f64 {
    x[0] * (m[0][0] * y[0] + m[0][1] * y[1]) + x[1] * (m[1][0] * y[0] + m[1][1] * y[1])
}

fn nonzero(x: [f64; 2]) -> Result<()> {
    if x[0] == 0.0 && x[1] == 0.0 || !x.iter().all(|v| v.is_finite()) {
        return Err(Error::InvalidConfig("the Lévy density is evaluated away from the origin".into()));
    }
    Ok(())
}

/// Density of the Lévy measure of `xi^` at `x != 0`. Zero for a clock
/// without jumps.
pub fn levy_density(x: [f64; 2], driver: &BrownianDriver, sub: &SubordinatorSpec) -> Result<f64> {
    driver.validate()?;
    sub.validate()?;
    nonzero(x)?;
    let Some(kappa) = sub.kappa() else {
        return Ok(0.0);
    };
    levy_density_unchecked(x, driver, kappa)
}

fn levy_density_unchecked(x: [f64; 2], driver: &BrownianDriver, kappa: f64) -> Result<f64> {
    let inv = driver.inverse();
    let mu = driver.drift;
    Mixture {
        q: quad(&inv, x, x),
        l: quad(&inv, x, mu),
        c: quad(&inv, mu, mu),
        dim: 2.0,
        log_det: driver.det().ln(),
        kappa,
    }
    .density("bivariate Lévy density")
}

/// Lévy density of the log-ratio `xi^_2 - xi^_1` in the dual market, where
/// given the clock it is normal with mean `-s tilde_sigma^2 / 2` and variance
/// `s tilde_sigma^2`. Satisfies `nu~(y) = e^{-y} nu~(-y)`.
pub fn dual_ratio_levy_density(y: f64, driver: &BrownianDriver, sub: &SubordinatorSpec) -> Result<f64> {
    driver.validate()?;
    sub.validate()?;
    if y == 0.0 || !y.is_finite() {
        return Err(Error::InvalidConfig("the ratio Lévy density is evaluated away from 0".into()));
    }
    let Some(kappa) = sub.kappa() else {
        return Ok(0.0);
    };
    let v = driver.ratio_variance();
    Mixture {
        q: y * y / v,
        l: -0.5 * y,
        c: 0.25 * v,
        dim: 1.0,
        log_det: v.ln(),
        kappa,
    }
    .density("ratio Lévy density")
}

/// `int h(x) nu(x) dx` over the plane, in polar coordinates split at
/// `|x| = 1`. `growth` bounds `|h(x)| <= C e^{<growth, x>}` for large `x`
/// and fixes the radial cut-off.
fn integrate_plane<H>(what: &'static str, driver: &BrownianDriver, kappa: f64, h: H, growth: [f64; 2]) -> Result<f64>
where
    H: Fn([f64; 2]) -> f64,
{
    let inv = driver.inverse();
    let mu = driver.drift;
    let c = quad(&inv, mu, mu);
    let g = 0.5 * c + 1.0 / kappa;
    let mut total = 0.0;
    for j in 0..N_THETA {
        let th = 2.0 * PI * j as f64 / N_THETA as f64;
        let u = [th.cos(), th.sin()];
        let a = quad(&inv, u, u);
        let b = quad(&inv, u, mu);
        let rate = (2.0 * g * a).sqrt() - b - (growth[0] * u[0] + growth[1] * u[1]);
        if rate <= 0.0 {
            return Err(Error::InvalidConfig(format!(
                "{what}: integrand not integrable against the Lévy measure"
            )));
        }
        let r_max = 1.0 + TRUNCATION / rate;
        let failure: Cell<Option<Error>> = Cell::new(None);
        let radial = |r: f64| {
            let x = [r * u[0], r * u[1]];
            match levy_density_unchecked(x, driver, kappa) {
                Ok(nu) => r * h(x) * nu,
                Err(e) => {
                    failure.set(Some(e));
                    f64::NAN
                }
            }
        };
        let inner = integrate_adaptive(what, radial, 0.0, 1.0, PLANE_TOL);
        let outer = integrate_adaptive(what, radial, 1.0, r_max, PLANE_TOL);
        if let Some(e) = failure.take() {
            return Err(e);
        }
        total += inner? + outer?;
    }
    Ok(total * 2.0 * PI / N_THETA as f64)
}

/// `gamma` computed from its definition and from the martingale condition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GammaVector {
    /// `b mu + int_{|x| <= 1} x nu(dx)`, evaluated as `b mu + int rho(ds)
    /// int_{|x| <= 1} x p_s(x) dx`.
    pub direct: [f64; 2],
    /// `-b Sigma_ii / 2 - int (e^{x_i} - 1 - x_i 1{|x| <= 1}) nu(dx)`.
    pub martingale: [f64; 2],
}

impl GammaVector {
    pub fn max_relative_difference(&self) -> f64 {
        (0..2)
            .map(|i| {
                let (p, q) = (self.direct[i], self.martingale[i]);
                (p - q).abs() / p.abs().max(q.abs()).max(f64::MIN_POSITIVE)
            })
            .fold(0.0, f64::max)
    }
}

/// `int_{|x| > 1} x p_s(x) dx` for the normal law with mean `s mu` and
/// covariance `s Sigma`; the radial integral is in closed form.
fn outer_first_moment(driver: &BrownianDriver, s: f64) -> [f64; 2] {
    let inv = driver.inverse();
    let mu = driver.drift;
    let c = quad(&inv, mu, mu);
    let pre = 1.0 / (2.0 * PI * s * driver.det().sqrt());
    let mut out = [0.0; 2];
    for j in 0..N_THETA {
        let th = 2.0 * PI * j as f64 / N_THETA as f64;
        let u = [th.cos(), th.sin()];
        let a = quad(&inv, u, u);
        let b = quad(&inv, u, mu);
        // along the ray the exponent is a Gaussian in r with mean m and variance v
        let m = s * b / a;
        let v = s / a;
        let sd = v.sqrt();
        let z = (1.0 - m) / sd;
        let second = (m * m + v) * normal_cdf(-z) + sd * (m + 1.0) * normal_pdf(z);
        let ray = pre * (0.5 * s * (b * b / a - c)).exp() * (2.0 * PI * v).sqrt() * second;
        out[0] += u[0] * ray;
        out[1] += u[1] * ray;
    }
    out.map(|x| x * 2.0 * PI / N_THETA as f64)
}

fn direct_gamma(driver: &BrownianDriver, sub: &SubordinatorSpec) -> Result<[f64; 2]> {
    let mu = driver.drift;
    let b = sub.drift;
    let Some(kappa) = sub.kappa() else {
        return Ok([b * mu[0], b * mu[1]]);
    };
    let [[s11, s12], [_, s22]] = driver.cov;
    let lmax = 0.5 * (s11 + s22) + (0.25 * (s11 - s22).powi(2) + s12 * s12).sqrt();
    let s_lo = 1.0 / (2.0 * lmax * TRUNCATION);
    let s_hi = (TRUNCATION + 10.0) * kappa;
    let mut out = [0.0; 2];
    for (i, o) in out.iter_mut().enumerate() {
        let f = |t: f64| {
            let s = t.exp();
            (-s / kappa).exp() / kappa * outer_first_moment(driver, s)[i]
        };
        let tail = integrate_adaptive("direct gamma vector", f, s_lo.ln(), s_hi.ln(), PLANE_TOL)?;
        // int s rho(ds) = 1 for the unit-mean gamma clock
        *o = (b + 1.0) * mu[i] - tail;
    }
    Ok(out)
}

fn martingale_gamma(driver: &BrownianDriver, sub: &SubordinatorSpec) -> Result<[f64; 2]> {
    let b = sub.drift;
    let mut out = [-0.5 * b * driver.cov[0][0], -0.5 * b * driver.cov[1][1]];
    if let Some(kappa) = sub.kappa() {
        for (i, o) in out.iter_mut().enumerate() {
            let mut growth = [0.0; 2];
            growth[i] = 1.0;
            let jumps = integrate_plane(
                "martingale gamma vector",
                driver,
                kappa,
                |x| {
                    let small = if x[0].hypot(x[1]) <= 1.0 { x[i] } else { 0.0 };
                    x[i].exp_m1() - small
                },
                growth,
            )?;
            *o -= jumps;
        }
    }
    Ok(out)
}

/// Both evaluations of the drift component `gamma` of the triplet. They
/// coincide when the driver has the martingale drift `-Sigma_ii / 2`.
pub fn gamma_vector(driver: &BrownianDriver, sub: &SubordinatorSpec) -> Result<GammaVector> {
    driver.validate()?;
    sub.validate()?;
    Ok(GammaVector {
        direct: direct_gamma(driver, sub)?,
        martingale: martingale_gamma(driver, sub)?,
    })
}

/// Characteristic triplet `(A, nu, gamma)` of `xi^` with respect to the
/// truncation `1{|x| <= 1}`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct BivariateTriplet {
    /// Diffusion matrix `b Sigma`.
    pub a: [[f64; 2]; 2],
    /// Drift, from its definition.
    pub gamma: [f64; 2],
    pub driver: BrownianDriver,
    pub sub: SubordinatorSpec,
}

pub fn bivariate_triplet(driver: &BrownianDriver, sub: &SubordinatorSpec) -> Result<BivariateTriplet> {
    driver.validate()?;
    sub.validate()?;
    let b = sub.drift;
    Ok(BivariateTriplet {
        a: driver.cov.map(|row| row.map(|v| b * v)),
        gamma: direct_gamma(driver, sub)?,
        driver: *driver,
        sub: *sub,
    })
}

impl BivariateTriplet {
    pub fn levy_density(&self, x: [f64; 2]) -> Result<f64> {
        levy_density(x, &self.driver, &self.sub)
    }

    /// `i <gamma, u> - u'Au / 2 + int (e^{i<u,x>} - 1 - i<u,x> 1{|x| <= 1}) nu(dx)`
    /// for complex `u`, with the jump integral done by quadrature.
    pub fn characteristic_exponent(&self, u: [Complex64; 2]) -> Result<Complex64> {
        let i = Complex64::i();
        let ug = u[0] * self.gamma[0] + u[1] * self.gamma[1];
        let uau = u[0] * (self.a[0][0] * u[0] + self.a[0][1] * u[1]) + u[1] * (self.a[1][0] * u[0] + self.a[1][1] * u[1]);
        let mut psi = i * ug - 0.5 * uau;
        if let Some(kappa) = self.sub.kappa() {
            let (al, be) = ([u[0].re, u[1].re], [u[0].im, u[1].im]);
            let growth = [-be[0], -be[1]];
            let small = |x: [f64; 2]| x[0].hypot(x[1]) <= 1.0;
            let re = integrate_plane(
                "characteristic exponent",
                &self.driver,
                kappa,
                |x| {
                    let bx = be[0] * x[0] + be[1] * x[1];
                    let ax = al[0] * x[0] + al[1] * x[1];
                    (-bx).exp() * ax.cos() - 1.0 + if small(x) { bx } else { 0.0 }
                },
                growth,
            )?;
            let im = integrate_plane(
                "characteristic exponent",
                &self.driver,
                kappa,
                |x| {
                    let bx = be[0] * x[0] + be[1] * x[1];
                    let ax = al[0] * x[0] + al[1] * x[1];
                    (-bx).exp() * ax.sin() - if small(x) { ax } else { 0.0 }
                },
                growth,
            )?;
            psi += Complex64::new(re, im);
        }
        Ok(psi)
    }
}

/// Closed-form characteristic exponent `psi(u)`, `E e^{i<u, xi^_t>} =
/// e^{t psi(u)}`: `b psi_BM(u) - ln(1 - kappa psi_BM(u)) / kappa`.
pub fn characteristic_exponent(driver: &BrownianDriver, sub: &SubordinatorSpec, u: [Complex64; 2]) -> Complex64 {
    let i = Complex64::i();
    let s = driver.cov;
    let mu = driver.drift;
    let uu = u[0] * (s[0][0] * u[0] + s[0][1] * u[1]) + u[1] * (s[1][0] * u[0] + s[1][1] * u[1]);
    let bm = i * (u[0] * mu[0] + u[1] * mu[1]) - 0.5 * uu;
    let mut psi = bm * sub.drift;
    if let Some(k) = sub.kappa() {
        psi -= (Complex64::new(1.0, 0.0) - bm * k).ln() / k;
    }
    psi
}
