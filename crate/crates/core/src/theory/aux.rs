//! The smoothed exponent `phi_n` governing the leading second-moment term,
//! with its building blocks
//!
//! * `f(x) = sqrt((1 - 2x)^2 + eps)`, a smoothed `|rho|`,
//! * `g(x) = -log(x (1 - x))`,
//! * `h(x) = -x log x - (1 - x) log(1 - x)`,
//!
//! and `phi_n = h + m(m+1)/(4n) (g - log 4) + m delta^2 / n f + g / (2n)`.

use std::f64::consts::PI;

use crate::error::{domain, Result};
use crate::laplace::ExponentFunction;

pub const DEFAULT_EPS_SMOOTH: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AuxParams {
    pub epsilon_smooth: f64,
    pub n: usize,
    pub m: usize,
    pub delta: f64,
}

impl AuxParams {
    pub fn new(n: usize, m: usize, delta: f64, epsilon_smooth: f64) -> Result<Self> {
        if !(epsilon_smooth > 0.0) {
            return Err(domain("epsilon_smooth", epsilon_smooth, "epsilon_smooth > 0"));
        }
        if n == 0 {
            return Err(domain("n", 0.0, "n >= 1"));
        }
        if !(delta > 0.0) {
            return Err(domain("delta", delta, "delta > 0"));
        }
        Ok(Self {
            epsilon_smooth,
            n,
            m,
            delta,
        })
    }

    fn coefficients(&self) -> (f64, f64, f64) {
        let (n, m) = (self.n as f64, self.m as f64);
        (m * (m + 1.0) / (4.0 * n), m * self.delta * self.delta / n, 1.0 / (2.0 * n))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AuxValues {
    pub f: f64,
    pub g: f64,
    pub h: f64,
    pub phi: f64,
    pub phi_dd: f64,
}

/// All five quantities at `x` in `[1/4, 3/4]`.
pub fn aux_functions(x: f64, params: &AuxParams) -> Result<AuxValues> {
    if !(0.25..=0.75).contains(&x) {
        return Err(domain("x", x, "1/4 <= x <= 3/4"));
    }
    Ok(eval(x, params))
}

fn eval(x: f64, p: &AuxParams) -> AuxValues {
    let y = 1.0 - x;
    let s = 1.0 - 2.0 * x;
    let u = s * s + p.epsilon_smooth;
    let f = u.sqrt();
    let g = -(x * y).ln();
    let h = -(x * x.ln() + y * y.ln());

    let f_dd = 4.0 * p.epsilon_smooth / (u * f);
    let g_dd = (2.0 * x * x - 2.0 * x + 1.0) / (x * x * y * y);
    let h_dd = -1.0 / (x * y);

    let (cg, cf, cs) = p.coefficients();
    AuxValues {
        f,
        g,
        h,
        phi: h + cg * (g - 4f64.ln()) + cf * f + cs * g,
        phi_dd: h_dd + cg * g_dd + cf * f_dd + cs * g_dd,
    }
}

/// `phi_n` on `[1/4, 3/4]` with its peak at `1/2`.
pub fn phi_exponent(params: AuxParams) -> Result<ExponentFunction> {
    ExponentFunction::new(0.25, 0.75, 0.5, move |x| {
        let v = eval(x, &params);
        (v.phi, v.phi_dd)
    })
}

/// `log 2 + sqrt(eps) m delta^2 / n + log 2 / n`
pub fn phi_at_half(params: &AuxParams) -> f64 {
    let (n, m) = (params.n as f64, params.m as f64);
    2f64.ln() + params.epsilon_smooth.sqrt() * m * params.delta * params.delta / n + 2f64.ln() / n
}

/// `-4 + 2m(m+1)/n + 4 m delta^2 / (sqrt(eps) n) + 4/n`
pub fn phi_dd_at_half(params: &AuxParams) -> f64 {
    let (n, m) = (params.n as f64, params.m as f64);
    -4.0 + 2.0 * m * (m + 1.0) / n + 4.0 * m * params.delta * params.delta / (params.epsilon_smooth.sqrt() * n)
        + 4.0 / n
}

/// Stirling form of the binomial coefficient:
/// `n h(k/n) - log(2 pi n (k/n)(1 - k/n)) / 2`.
pub fn binomial_log_approx(n: usize, k: usize) -> Result<f64> {
    if k == 0 || k >= n {
        return Err(domain("k", k as f64, "1 <= k <= n - 1"));
    }
    let nf = n as f64;
    let x = k as f64 / nf;
    let y = (n - k) as f64 / nf;
    let h = -(x * x.ln() + y * y.ln());
    Ok(nf * h - 0.5 * (2.0 * PI * nf * (x * y)).ln())
}
