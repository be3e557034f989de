//! Small-norm probabilities `P(||X|| <= delta)`, the `xi` calibration and the
//! predicted discrepancy scale.

use std::f64::consts::LN_2;

use rand::Rng;

use crate::densities::{constants, vandermonde};
use crate::error::{domain, Error, Result};
use crate::quadrature::{integrate_ordered_box, Quadrature};
use crate::rmt::{sample_goe, spectral_norm};
use crate::rng::RandomStream;

/// Largest dimension handled by exact quadrature.
pub const MAX_EXACT_DIM: usize = 3;

// Beyond this radius the GOE eigenvalue density carries less than e^-400 mass.
const TAIL_CUTOFF: f64 = 40.0;

/// `2 sqrt(m) e^{-3/4}`, where the asymptotic formula reaches probability one.
pub fn xi_boundary(m: usize) -> f64 {
    2.0 * (m as f64).sqrt() * (-0.75f64).exp()
}

fn check_delta(delta: f64) -> Result<()> {
    if delta > 0.0 && delta.is_finite() {
        Ok(())
    } else {
        Err(domain("delta", delta, "0 < delta < inf"))
    }
}

/// `log P(||X|| <= delta)` for a GOE matrix of dimension `m <= 3`, by nested
/// quadrature of the eigenvalue density over the ordered box `[-delta, delta]^m`.
///
/// The integral is taken in the scaled variable `lambda = L t` with
/// `L = min(delta, 40)`, so the Vandermonde factor and the volume element
/// contribute the exact power `L^{m(m+1)/2}` and tiny radii do not underflow.
pub fn log_small_norm_prob_exact(m: usize, delta: f64) -> Result<f64> {
    if m == 0 {
        return Err(Error::InvalidDimension(0));
    }
    if m > MAX_EXACT_DIM {
        return Err(Error::UnsupportedDimension(m));
    }
    check_delta(delta)?;
    let c = constants(m)?;
    let l = delta.min(TAIL_CUTOFF);
    let quarter_l2 = l * l / 4.0;
    let rel_tol = if m == 3 { 1e-10 } else { 1e-13 };
    let q = Quadrature::new(0.0, rel_tol).with_max_panels(4000);
    let integrand = |t: &[f64]| {
        let norm2: f64 = t.iter().map(|v| v * v).sum();
        (-quarter_l2 * norm2).exp() * vandermonde(t)
    };
    let e = integrate_ordered_box(q, m, -1.0, 1.0, &integrand);
    if !e.converged {
        return Err(Error::AccuracyNotMet {
            estimate: e.value,
            error: e.error,
        });
    }
    let mf = m as f64;
    Ok((c.log_c + (mf * (mf + 1.0) / 2.0) * l.ln() + e.value.ln()).min(0.0))
}

/// `delta` with `P(||X|| <= delta) = p`, by bisection on the exact probability.
pub fn delta_for_probability(m: usize, p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(domain("p", p, "0 < p < 1"));
    }
    let target = p.ln();
    let (mut lo, mut hi) = (1e-8, 4.0 * (m as f64).sqrt() + 10.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if log_small_norm_prob_exact(m, mid)? < target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-14 * hi {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Monte Carlo estimate of a probability with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub p: f64,
    pub std_error: f64,
    pub samples: u64,
}

impl McEstimate {
    pub fn from_hits(hits: u64, samples: u64) -> Self {
        let p = hits as f64 / samples as f64;
        Self {
            p,
            std_error: (p * (1.0 - p) / samples as f64).sqrt(),
            samples,
        }
    }
}

/// Plain Monte Carlo estimate of `P(||X|| <= delta)` for any `m`.
pub fn small_norm_prob_mc(m: usize, delta: f64, samples: u64, stream: RandomStream) -> Result<McEstimate> {
    check_delta(delta)?;
    if samples == 0 {
        return Err(domain("samples", 0.0, "samples >= 1"));
    }
    let mut rng = stream.rng();
    let mut hits = 0u64;
    for _ in 0..samples {
        if spectral_norm(&sample_goe(m, &mut rng)?)? <= delta {
            hits += 1;
        }
    }
    Ok(McEstimate::from_hits(hits, samples))
}

/// Same as [`small_norm_prob_mc`] with a caller-owned generator.
pub fn small_norm_hits<R: Rng + ?Sized>(m: usize, delta: f64, samples: u64, rng: &mut R) -> Result<u64> {
    let mut hits = 0u64;
    for _ in 0..samples {
        if spectral_norm(&sample_goe(m, rng)?)? <= delta {
            hits += 1;
        }
    }
    Ok(hits)
}

/// `(m^2 / (2 xi)) log(e^{3/4} delta / (2 sqrt m))`
pub fn small_norm_prob_asymptotic(m: usize, delta: f64, xi: f64) -> f64 {
    let mf = m as f64;
    (mf * mf / (2.0 * xi)) * (delta / xi_boundary(m)).ln()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XiCalibration {
    pub m: usize,
    pub delta_ref: f64,
    pub xi_hat: f64,
    pub iterations: usize,
    pub converged: bool,
    /// `n` whose predicted scale fixed `delta_ref`, for self-consistent runs.
    pub n_ref: Option<usize>,
}

const BOUNDARY_GUARD: f64 = 1e-6;
const MAX_CALIBRATION_ITERS: usize = 20;
const CALIBRATION_TOL: f64 = 1e-6;

fn xi_at(m: usize, delta: f64) -> Result<f64> {
    let mf = m as f64;
    let log_p = log_small_norm_prob_exact(m, delta)?;
    Ok((mf * mf / 2.0) * (delta / xi_boundary(m)).ln() / log_p)
}

/// `xi` making the asymptotic formula exact at `delta_ref`.
pub fn calibrate_xi(m: usize, delta_ref: f64) -> Result<XiCalibration> {
    check_delta(delta_ref)?;
    if delta_ref >= xi_boundary(m) - BOUNDARY_GUARD {
        return Err(domain("delta_ref", delta_ref, "delta_ref < 2 sqrt(m) e^{-3/4} - 1e-6"));
    }
    Ok(XiCalibration {
        m,
        delta_ref,
        xi_hat: xi_at(m, delta_ref)?,
        iterations: 1,
        converged: true,
        n_ref: None,
    })
}

/// Fixed point of `xi -> calibrate_xi(m, predicted_delta(n_ref, m, xi))`,
/// started at `xi = 1`.
///
/// Stops once successive iterates differ by less than `1e-6`; after 20
/// iterations the last iterate is returned with `converged = false`.
pub fn calibrate_xi_self_consistent(m: usize, n_ref: usize) -> Result<XiCalibration> {
    if n_ref == 0 {
        return Err(domain("n_ref", 0.0, "n_ref >= 1"));
    }
    let mut xi = 1.0;
    let mut delta = predicted_delta(n_ref, m, xi, 1.0);
    for it in 1..=MAX_CALIBRATION_ITERS {
        let next = xi_at(m, delta)?;
        let step = (next - xi).abs();
        xi = next;
        if step < CALIBRATION_TOL {
            return Ok(XiCalibration {
                m,
                delta_ref: delta,
                xi_hat: xi,
                iterations: it,
                converged: true,
                n_ref: Some(n_ref),
            });
        }
        delta = predicted_delta(n_ref, m, xi, 1.0);
    }
    Ok(XiCalibration {
        m,
        delta_ref: delta,
        xi_hat: xi,
        iterations: MAX_CALIBRATION_ITERS,
        converged: false,
        n_ref: Some(n_ref),
    })
}

fn log_predicted_unscaled(n: usize, m: usize, xi: f64) -> f64 {
    let (nf, mf) = (n as f64, m as f64);
    LN_2 - 0.75 + 0.5 * (nf * mf).ln() - xi * nf * 2.0 * LN_2 / (mf * mf)
}

/// `scale * 2 e^{-3/4} sqrt(nm) 4^{-xi n / m^2}`
pub fn predicted_discrepancy(n: usize, m: usize, xi: f64, scale: f64) -> f64 {
    if scale == 0.0 {
        return 0.0;
    }
    (scale.ln() + log_predicted_unscaled(n, m, xi)).exp()
}

/// Predicted discrepancy divided by `sqrt(n)`: the matching norm threshold
/// for the normalized GOE sum.
pub fn predicted_delta(n: usize, m: usize, xi: f64, scale: f64) -> f64 {
    if scale == 0.0 {
        return 0.0;
    }
    (scale.ln() + log_predicted_unscaled(n, m, xi) - 0.5 * (n as f64).ln()).exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    // log erf(d / 2) = log P(|X| <= d) for X ~ N(0, 2), 30-digit reference values
    const LOG_ERF_HALF: [(f64, f64); 6] = [
        (1e-6, -14.387_875_500_889_057_525),
        (0.1, -2.875_783_091_518_404_053_7),
        (0.5, -1.286_172_538_880_422_278_5),
        (1.0, -0.652_965_625_676_331_160_65),
        (3.0, -0.034_482_603_410_124_367_354),
        (8.0, -1.541_725_801_912_594_065_6e-8),
    ];

    #[test]
    fn scalar_case_matches_erf() {
        for (d, want) in LOG_ERF_HALF {
            let got = log_small_norm_prob_exact(1, d).unwrap();
            assert!((got - want).abs() < 1e-12 * want.abs().max(1e-3), "d={d}: {got} vs {want}");
        }
        let p = log_small_norm_prob_exact(1, 0.1).unwrap().exp();
        assert!((p - 0.056_372).abs() < 1e-6);
    }

    #[test]
    fn total_mass_at_large_radius() {
        assert!(log_small_norm_prob_exact(1, 50.0).unwrap().abs() < 1e-12);
        assert!(log_small_norm_prob_exact(2, 50.0).unwrap().abs() < 1e-10);
    }

    #[test]
    fn nondecreasing_in_delta() {
        for m in [1, 2] {
            let grid: Vec<f64> = (1..=40).map(|i| 0.25 * i as f64).collect();
            let vals: Vec<f64> = grid.iter().map(|&d| log_small_norm_prob_exact(m, d).unwrap()).collect();
            assert!(vals.windows(2).all(|w| w[1] >= w[0]), "m={m}: {vals:?}");
            assert!(vals.last().unwrap().abs() < 1e-9);
        }
    }

    #[test]
    fn unsupported_and_invalid() {
        assert_eq!(log_small_norm_prob_exact(4, 0.5), Err(Error::UnsupportedDimension(4)));
        assert!(log_small_norm_prob_exact(2, 0.0).is_err());
        assert!(log_small_norm_prob_exact(2, f64::NAN).is_err());
    }

    #[test]
    fn m2_matches_monte_carlo() {
        let exact = log_small_norm_prob_exact(2, 0.5).unwrap().exp();
        let mc = small_norm_prob_mc(2, 0.5, 10_000_000, RandomStream::new(5, 0)).unwrap();
        assert!((mc.p - exact).abs() <= 3.0 * mc.std_error, "{exact} vs {mc:?}");
    }

    #[test]
    fn m3_matches_monte_carlo() {
        let exact = log_small_norm_prob_exact(3, 1.5).unwrap().exp();
        let mc = small_norm_prob_mc(3, 1.5, 400_000, RandomStream::new(6, 0)).unwrap();
        assert!((mc.p - exact).abs() <= 3.0 * mc.std_error, "{exact} vs {mc:?}");
    }

    #[test]
    fn asymptotic_formula_values() {
        for m in 1..6 {
            assert!(small_norm_prob_asymptotic(m, xi_boundary(m), 1.0).abs() < 1e-15);
        }
        let v = small_norm_prob_asymptotic(2, 0.2, 1.0);
        assert!((v - (-3.798_317_366_548_036_566)).abs() < 1e-14, "{v}");
        let base: f64 = 0.75f64.exp() * 0.2 / (2.0 * 2f64.sqrt());
        assert!((v - 2.0 * base.ln()).abs() < 1e-14);
    }

    #[test]
    fn xi_hat_scalar_case() {
        let cal = calibrate_xi(1, 0.1).unwrap();
        let want = 0.390_455_782_318_452_207_77;
        assert!((cal.xi_hat - want).abs() < 1e-10 * want, "{} vs {want}", cal.xi_hat);
        assert!(cal.converged);
        // the calibrated formula reproduces the exact probability
        let lhs = small_norm_prob_asymptotic(1, 0.1, cal.xi_hat);
        assert!((lhs / log_small_norm_prob_exact(1, 0.1).unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn xi_hat_rejects_boundary() {
        assert!(calibrate_xi(2, xi_boundary(2)).is_err());
        assert!(calibrate_xi(2, xi_boundary(2) - 1e-7).is_err());
        assert!(calibrate_xi(2, xi_boundary(2) - 1e-3).is_ok());
    }

    #[test]
    fn xi_hat_sweep_is_continuous() {
        let xs: Vec<f64> = (0..=45)
            .map(|i| calibrate_xi(2, 0.05 + 0.01 * i as f64).unwrap().xi_hat)
            .collect();
        assert!(xs.iter().all(|x| x.is_finite() && *x > 0.0));
        assert!(xs.windows(2).all(|w| (w[1] - w[0]).abs() < 0.05), "{xs:?}");
    }

    #[test]
    fn self_consistent_calibration() {
        let cal = calibrate_xi_self_consistent(2, 18).unwrap();
        assert!(cal.converged, "{cal:?}");
        assert!(cal.xi_hat > 0.5 && cal.xi_hat < 2.0);
        let again = calibrate_xi(2, cal.delta_ref).unwrap();
        assert!((again.xi_hat - cal.xi_hat).abs() < 1e-6);
        // at the fixed point the exact probability is 2^{-n}
        let log_p = log_small_norm_prob_exact(2, predicted_delta(18, 2, cal.xi_hat, 1.0)).unwrap();
        assert!((log_p + 18.0 * LN_2).abs() < 1e-4 * 18.0 * LN_2);
    }

    #[test]
    fn prediction_values() {
        let m = 3;
        let v = predicted_discrepancy(m * m, m, 1.0, 1.0);
        let want = 2.0 * (-0.75f64).exp() * (m as f64).powf(1.5) / 4.0;
        assert!((v - want).abs() < 1e-14 * want);
        let v = predicted_discrepancy(100, 2, 1.0, 1.0);
        assert!((v / 1.186_654_659_508_990_218_6e-14 - 1.0).abs() < 1e-13, "{v}");
        assert_eq!(predicted_discrepancy(100, 2, 1.0, 0.0), 0.0);
        let d = predicted_delta(100, 2, 1.0, 1.0);
        assert!((d * 10.0 / v - 1.0).abs() < 1e-14);
    }
}
