//! Laplace's method for `int_a^b exp(n phi(x)) dx` with an interior peak.
//!
//! [`laplace_closed_form`] is the Gaussian approximant at the peak,
//! [`integrate_exp_n_phi`] a shifted-log adaptive quadrature of the same
//! integral, and [`laplace_error_decay`] compares the two along a family
//! `n -> phi_n`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use log::warn;

use crate::error::{domain, Error, Result};
use crate::quadrature::Quadrature;

type Evaluator = dyn Fn(f64) -> (f64, f64) + Send + Sync;

/// A twice differentiable exponent on `[a, b]` with its peak at `y`.
///
/// The evaluator returns `(phi(x), phi''(x))` and must be stateless.
#[derive(Clone)]
pub struct ExponentFunction {
    a: f64,
    b: f64,
    y: f64,
    eval: Arc<Evaluator>,
}

impl fmt::Debug for ExponentFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ExponentFunction")
            .field("a", &self.a)
            .field("b", &self.b)
            .field("y", &self.y)
            .finish_non_exhaustive()
    }
}

impl ExponentFunction {
    pub fn new<F>(a: f64, b: f64, y: f64, eval: F) -> Result<Self>
    where
        F: Fn(f64) -> (f64, f64) + Send + Sync + 'static,
    {
        if !(a < y && y < b) {
            return Err(domain("peak", y, "a < y < b"));
        }
        Ok(Self {
            a,
            b,
            y,
            eval: Arc::new(eval),
        })
    }

    pub fn interval(&self) -> (f64, f64) {
        (self.a, self.b)
    }

    pub fn peak(&self) -> f64 {
        self.y
    }

    pub fn value(&self, x: f64) -> f64 {
        (self.eval)(x).0
    }

    pub fn second_derivative(&self, x: f64) -> f64 {
        (self.eval)(x).1
    }
}

/// `log[ sqrt(2 pi / (n |phi''(y)|)) exp(n phi(y)) ]`
pub fn laplace_closed_form(phi: &ExponentFunction, n: f64) -> Result<f64> {
    if !(n > 0.0) {
        return Err(domain("n", n, "n > 0"));
    }
    let (value, curvature) = (phi.eval)(phi.y);
    if !(curvature < 0.0) {
        return Err(Error::NonConcavePeak(curvature));
    }
    Ok(0.5 * (2.0 * PI / (n * curvature.abs())).ln() + n * value)
}

const PEAK_GRID: usize = 2001;

/// `log int_a^b exp(n phi(x)) dx` by adaptive quadrature of
/// `exp(n phi(x) - M)`, `M` the grid maximum of `n phi`, split at the peak.
pub fn integrate_exp_n_phi(phi: &ExponentFunction, n: f64) -> Result<f64> {
    if !(n > 0.0) {
        return Err(domain("n", n, "n > 0"));
    }
    let (a, b) = phi.interval();
    let shift = (0..PEAK_GRID)
        .map(|i| a + (b - a) * i as f64 / (PEAK_GRID - 1) as f64)
        .chain(std::iter::once(phi.y))
        .map(|x| n * phi.value(x))
        .fold(f64::NEG_INFINITY, f64::max);
    let q = Quadrature::new(0.0, 1e-10).with_max_panels(5000);
    let e = q.integrate_with_breaks(|x| (n * phi.value(x) - shift).exp(), &[a, phi.y, b])?;
    Ok(shift + e.value.ln())
}

/// `max |phi''(x) - phi''(y)|` over a grid on `[y - radius, y + radius]`.
pub fn equicontinuity_modulus(phi: &ExponentFunction, radius: f64) -> f64 {
    let (a, b) = phi.interval();
    let lo = (phi.y - radius).max(a);
    let hi = (phi.y + radius).min(b);
    let at_peak = phi.second_derivative(phi.y);
    (0..=200)
        .map(|i| lo + (hi - lo) * i as f64 / 200.0)
        .map(|x| (phi.second_derivative(x) - at_peak).abs())
        .fold(0.0, f64::max)
}

/// Grid proxies for the hypotheses of the sequence form of Laplace's method.
#[derive(Debug, Clone, PartialEq)]
pub struct HypothesisCheck {
    pub peak_curvature: f64,
    /// `(radius, modulus)` for shrinking radii.
    pub moduli: Vec<(f64, f64)>,
    pub ok: bool,
}

pub const MODULUS_RADII: [f64; 3] = [0.1, 0.05, 0.01];

pub fn check_hypotheses(phi: &ExponentFunction) -> HypothesisCheck {
    let peak_curvature = phi.second_derivative(phi.y);
    let moduli: Vec<(f64, f64)> = MODULUS_RADII
        .iter()
        .map(|&r| (r, equicontinuity_modulus(phi, r)))
        .collect();
    let shrinking = moduli.windows(2).all(|w| w[1].1 <= w[0].1);
    HypothesisCheck {
        peak_curvature,
        moduli,
        ok: peak_curvature < 0.0 && shrinking,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecayPoint {
    pub n: f64,
    pub closed_form_log: f64,
    pub quadrature_log: f64,
    /// `|quadrature - closed form| / closed form`
    pub rel_error: f64,
    pub hypotheses: HypothesisCheck,
}

/// Relative error of the closed form against quadrature for each `n`.
///
/// A failed hypothesis check is logged and recorded but does not abort.
pub fn laplace_error_decay<F>(family: F, n_list: &[f64]) -> Result<Vec<DecayPoint>>
where
    F: Fn(f64) -> Result<ExponentFunction>,
{
    n_list
        .iter()
        .map(|&n| {
            let phi = family(n)?;
            let hypotheses = check_hypotheses(&phi);
            if !hypotheses.ok {
                warn!("Laplace hypotheses not met on the grid at n = {n}: {hypotheses:?}");
            }
            let closed_form_log = laplace_closed_form(&phi, n)?;
            let quadrature_log = integrate_exp_n_phi(&phi, n)?;
            let rel_error = (quadrature_log - closed_form_log).exp_m1().abs();
            Ok(DecayPoint {
                n,
                closed_form_log,
                quadrature_log,
                rel_error,
                hypotheses,
            })
        })
        .collect()
}

/// `phi(x) = -(x - 1/2)^2` on `[a, b]`.
pub fn quadratic_exponent(a: f64, b: f64) -> Result<ExponentFunction> {
    ExponentFunction::new(a, b, 0.5, |x| (-(x - 0.5) * (x - 0.5), -2.0))
}
