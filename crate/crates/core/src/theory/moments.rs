//! Correlation coefficients, probability-ratio bounds, binomial bounds and
//! the first and second moments of the counting variable `S_n(eps)`.

use std::f64::consts::LN_2;

use super::aux::{phi_exponent, AuxParams};
use super::small_norm::{log_small_norm_prob_exact, small_norm_prob_asymptotic};
use crate::densities::log_gamma;
use crate::error::{domain, Error, Result};
use crate::laplace::laplace_closed_form;

fn check_k(k: usize, n: usize) -> Result<()> {
    if n == 0 {
        return Err(domain("n", 0.0, "n >= 1"));
    }
    if k > n {
        return Err(domain("k", k as f64, "0 <= k <= n"));
    }
    Ok(())
}

/// `1 - 2k/n`
pub fn rho_k(k: usize, n: usize) -> Result<f64> {
    check_k(k, n)?;
    Ok(1.0 - 2.0 * k as f64 / n as f64)
}

// |rho_k| and 1 - rho_k^2 = 4k(n-k)/n^2, both symmetric in k <-> n-k bit for bit
fn abs_rho_and_complement(k: usize, n: usize) -> (f64, f64) {
    let nf = n as f64;
    let abs_rho = (n as i64 - 2 * k as i64).unsigned_abs() as f64 / nf;
    let one_minus = 4.0 * (k as f64 * (n - k) as f64) / (nf * nf);
    (abs_rho, one_minus)
}

fn interior(k: usize, n: usize) -> Result<(f64, f64)> {
    check_k(k, n)?;
    if k == 0 || k == n {
        return Err(Error::DegenerateCorrelation(rho_k(k, n)?));
    }
    Ok(abs_rho_and_complement(k, n))
}

/// `log` of the closed-form bound on `R_k(delta)`:
/// `-(m(m+1)/4) log(1 - rho_k^2) + |rho_k| m delta^2`, for `0 < k < n`.
pub fn ratio_bound(k: usize, n: usize, m: usize, delta: f64) -> Result<f64> {
    let (abs_rho, one_minus) = interior(k, n)?;
    let mf = m as f64;
    Ok(-(mf * (mf + 1.0) / 4.0) * one_minus.ln() + abs_rho * mf * delta * delta)
}

/// Where the density ratio of the correlated pair peaks on `D_delta x D_delta`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Maximizer {
    /// `lambda = mu = (delta, ..., delta)`, used for `rho >= 0`.
    Aligned,
    /// `lambda = (delta, ..., delta)`, `mu = -lambda`, used for `rho < 0`.
    Opposed,
}

impl Maximizer {
    /// The maximizing pair `(lambda, mu)` in dimension `m`.
    pub fn point(self, m: usize, delta: f64) -> (Vec<f64>, Vec<f64>) {
        let lam = vec![delta; m];
        let mu = match self {
            Maximizer::Aligned => lam.clone(),
            Maximizer::Opposed => vec![-delta; m],
        };
        (lam, mu)
    }
}

/// Log density ratio of a correlated eigenvalue pair to the product of its
/// marginals:
/// `-(m(m+1)/4) log(1 - rho^2) - (rho^2 |l|^2 - 2 rho <l, u> + rho^2 |u|^2) / (4 (1 - rho^2))`.
pub fn log_remainder(lam: &[f64], mu: &[f64], rho: f64) -> Result<f64> {
    if lam.len() != mu.len() {
        return Err(Error::DimensionMismatch {
            expected: lam.len(),
            found: mu.len(),
        });
    }
    if !(rho.abs() < 1.0) {
        return Err(Error::DegenerateCorrelation(rho));
    }
    let mf = lam.len() as f64;
    let one_minus = 1.0 - rho * rho;
    let l2: f64 = lam.iter().map(|v| v * v).sum();
    let u2: f64 = mu.iter().map(|v| v * v).sum();
    let dot: f64 = lam.iter().zip(mu).map(|(a, b)| a * b).sum();
    Ok(-(mf * (mf + 1.0) / 4.0) * one_minus.ln() - (rho * rho * (l2 + u2) - 2.0 * rho * dot) / (4.0 * one_minus))
}

/// The boundary maximizer of the density ratio and its log value
/// `-(m(m+1)/4) log(1 - rho^2) + |rho| m delta^2 / (2 (1 + |rho|))`.
pub fn ratio_bound_tight_point(k: usize, n: usize, delta: f64, m: usize) -> Result<(Maximizer, f64)> {
    let (abs_rho, one_minus) = interior(k, n)?;
    let mf = m as f64;
    let which = if 2 * k <= n { Maximizer::Aligned } else { Maximizer::Opposed };
    let value = -(mf * (mf + 1.0) / 4.0) * one_minus.ln() + abs_rho * mf * delta * delta / (2.0 * (1.0 + abs_rho));
    Ok((which, value))
}

/// `log binom(n, k)`
pub fn log_binomial(n: usize, k: usize) -> Result<f64> {
    check_k(k, n)?;
    if k == 0 || k == n {
        return Ok(0.0);
    }
    Ok(log_gamma(n as f64 + 1.0)? - log_gamma(k as f64 + 1.0)? - log_gamma((n - k) as f64 + 1.0)?)
}

/// `log (e n / t)^t`, bounding `log sum_{k <= t} binom(n, k)`.
pub fn binomial_tail_bound(n: usize, t: usize) -> Result<f64> {
    if t == 0 || t > n {
        return Err(domain("t", t as f64, "1 <= t <= n"));
    }
    let tf = t as f64;
    Ok(tf * (1.0 + (n as f64).ln() - tf.ln()))
}

/// `n log 2 + log P(||X|| <= eps / sqrt(n))` with the exact probability (`m <= 3`).
pub fn first_moment_log(n: usize, m: usize, epsilon: f64) -> Result<f64> {
    if n == 0 {
        return Err(domain("n", 0.0, "n >= 1"));
    }
    let delta = epsilon / (n as f64).sqrt();
    Ok(n as f64 * LN_2 + log_small_norm_prob_exact(m, delta)?)
}

/// First moment from the asymptotic small-norm formula with a supplied `xi`,
/// capped at probability one.
pub fn first_moment_log_asymptotic(n: usize, m: usize, epsilon: f64, xi: f64) -> Result<f64> {
    if !(epsilon > 0.0) || !(xi > 0.0) {
        return Err(domain("epsilon", epsilon, "epsilon > 0 and xi > 0"));
    }
    let delta = epsilon / (n as f64).sqrt();
    Ok(n as f64 * LN_2 + small_norm_prob_asymptotic(m, delta, xi).min(0.0))
}

/// Log-sum-exp in the order given.
pub fn log_sum_exp(terms: &[f64]) -> f64 {
    let max = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + terms.iter().map(|t| (t - max).exp()).sum::<f64>().ln()
}

/// The second-moment sum `2^{-n} sum_k binom(n, k) Rbar_k(delta)` and its parts.
///
/// `total = E[S^2] / E[S]^2` under the closed-form bounds. The leading term
/// covers `ceil(n/4) <= k <= floor(3n/4)`; the lower term everything else,
/// including the endpoints `k = 0, n` where `Rbar = 1 / P(||X|| <= delta)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentReport {
    pub n: usize,
    pub m: usize,
    pub delta: f64,
    /// `delta sqrt(n)`
    pub epsilon: f64,
    pub log_first_moment: f64,
    pub log_second_moment_upper: f64,
    pub total: f64,
    pub leading_term: f64,
    pub lower_term: f64,
    /// Laplace-method estimate of the leading term from `phi_n`; `None`
    /// when `phi_n` is not concave at `1/2` (small `n`).
    pub leading_laplace: Option<f64>,
}

/// Second-moment terms using the exact small-norm probability (`m <= 3`).
pub fn second_moment_terms(n: usize, m: usize, delta: f64, eps_smooth: f64) -> Result<MomentReport> {
    let log_p = log_small_norm_prob_exact(m, delta)?;
    second_moment_terms_with(n, m, delta, eps_smooth, log_p)
}

/// As [`second_moment_terms`] with a caller-supplied `log P(||X|| <= delta)`.
pub fn second_moment_terms_with(
    n: usize,
    m: usize,
    delta: f64,
    eps_smooth: f64,
    log_p: f64,
) -> Result<MomentReport> {
    if n < 4 {
        return Err(domain("n", n as f64, "n >= 4"));
    }
    if !(log_p <= 0.0) {
        return Err(domain("log_p", log_p, "log_p <= 0"));
    }
    let lo = n.div_ceil(4);
    let hi = 3 * n / 4;
    let nf = n as f64;
    let mut leading = Vec::with_capacity(hi - lo + 1);
    let mut lower = Vec::with_capacity(n + 1 - leading.capacity());
    for k in 0..=n {
        let r = if k == 0 || k == n { -log_p } else { ratio_bound(k, n, m, delta)? };
        let term = log_binomial(n, k)? - nf * LN_2 + r;
        if (lo..=hi).contains(&k) {
            leading.push(term);
        } else {
            lower.push(term);
        }
    }
    let log_leading = log_sum_exp(&leading);
    let log_lower = log_sum_exp(&lower);
    let log_total = log_sum_exp(&[log_leading, log_lower]);

    let phi = phi_exponent(AuxParams::new(n, m, delta, eps_smooth)?)?;
    let leading_laplace = match laplace_closed_form(&phi, nf) {
        Ok(v) => Some((v - nf * LN_2 + 0.5 * (nf / (2.0 * std::f64::consts::PI)).ln()).exp()),
        Err(Error::NonConcavePeak(_)) => None,
        Err(e) => return Err(e),
    };

    let log_first_moment = nf * LN_2 + log_p;
    Ok(MomentReport {
        n,
        m,
        delta,
        epsilon: delta * nf.sqrt(),
        log_first_moment,
        log_second_moment_upper: 2.0 * log_first_moment + log_total,
        total: log_total.exp(),
        leading_term: log_leading.exp(),
        lower_term: log_lower.exp(),
        leading_laplace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::theory::aux::DEFAULT_EPS_SMOOTH;

    fn binom_u128(n: u32, k: u32) -> u128 {
        (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
    }

    #[test]
    fn correlation_coefficients() {
        assert_eq!(rho_k(0, 10).unwrap(), 1.0);
        assert_eq!(rho_k(5, 10).unwrap(), 0.0);
        assert_eq!(rho_k(10, 10).unwrap(), -1.0);
        assert!(rho_k(11, 10).is_err());
    }

    #[test]
    fn ratio_bound_properties() {
        assert_eq!(ratio_bound(5, 10, 2, 0.7).unwrap(), 0.0);
        assert!(matches!(ratio_bound(0, 10, 2, 0.5), Err(Error::DegenerateCorrelation(_))));
        assert!(matches!(ratio_bound(10, 10, 2, 0.5), Err(Error::DegenerateCorrelation(_))));
        for n in 2..60 {
            for k in 1..n {
                for (m, d) in [(1, 0.1), (2, 0.5), (3, 1.3)] {
                    let b = ratio_bound(k, n, m, d).unwrap();
                    assert!(b >= 0.0);
                    assert_eq!(b.to_bits(), ratio_bound(n - k, n, m, d).unwrap().to_bits());
                }
            }
        }
    }

    #[test]
    fn tight_point_matches_remainder() {
        for n in [7, 10, 31] {
            for k in 1..n {
                let rho = rho_k(k, n).unwrap();
                let (which, value) = ratio_bound_tight_point(k, n, 0.4, 3).unwrap();
                let (lam, mu) = which.point(3, 0.4);
                let direct = log_remainder(&lam, &mu, rho).unwrap();
                assert!((value - direct).abs() < 1e-12, "k={k} n={n}");
                assert!(value <= ratio_bound(k, n, 3, 0.4).unwrap() + 1e-15);
            }
        }
        let (_, v) = ratio_bound_tight_point(5, 10, 0.9, 2).unwrap();
        assert_eq!(v, 0.0);
        // rho >= 0 closed form
        let rho = rho_k(2, 10).unwrap();
        let (w, v) = ratio_bound_tight_point(2, 10, 0.5, 2).unwrap();
        assert_eq!(w, Maximizer::Aligned);
        let want = -1.5 * (1.0 - rho * rho).ln() + rho * 2.0 * 0.25 / (2.0 * (1.0 + rho));
        assert!((v - want).abs() < 1e-15);
    }

    #[test]
    fn tight_point_is_grid_maximum() {
        let delta = 0.5;
        let g: Vec<f64> = (0..41).map(|i| -delta + 2.0 * delta * i as f64 / 40.0).collect();
        for (k, n) in [(2, 10), (8, 10), (3, 7)] {
            let rho = rho_k(k, n).unwrap();
            let mut best = f64::NEG_INFINITY;
            for a in 0..41 {
                for b in a..41 {
                    for c in 0..41 {
                        for d in c..41 {
                            let r = log_remainder(&[g[a], g[b]], &[g[c], g[d]], rho).unwrap();
                            best = best.max(r);
                        }
                    }
                }
            }
            let (_, v) = ratio_bound_tight_point(k, n, delta, 2).unwrap();
            assert!((best - v).abs() < 1e-9, "k={k}: grid {best} vs {v}");
        }
    }

    #[test]
    fn binomial_tail_exhaustive() {
        for n in 1..=30u32 {
            let mut partial = 0u128;
            for t in 1..=n {
                if t == 1 {
                    partial = 1;
                }
                partial += binom_u128(n, t);
                let bound = binomial_tail_bound(n as usize, t as usize).unwrap();
                assert!((partial as f64).ln() <= bound + 1e-12, "n={n} t={t}");
            }
        }
        assert!((binomial_tail_bound(10, 2).unwrap().exp() - 184.7).abs() < 0.1);
        assert!(binomial_tail_bound(10, 0).is_err());
    }

    #[test]
    fn log_binomial_exact() {
        for n in [1u32, 10, 40, 100] {
            for k in 0..=n {
                let exact = if n <= 100 { (binom_u128(n, k) as f64).ln() } else { 0.0 };
                assert!((log_binomial(n as usize, k as usize).unwrap() - exact).abs() < 1e-11 * exact.max(1.0));
            }
        }
    }

    #[test]
    fn first_moment_limits() {
        let v = first_moment_log(12, 2, 1e3 * 12f64.sqrt()).unwrap();
        assert!((v - 12.0 * LN_2).abs() < 1e-9);
        let a = first_moment_log_asymptotic(12, 5, 1e3, 1.0).unwrap();
        assert_eq!(a, 12.0 * LN_2);
    }

    #[test]
    fn second_moment_structure() {
        for (n, delta) in [(4, 0.3), (10, 0.5), (40, 0.01), (101, 0.2)] {
            let r = second_moment_terms(n, 2, delta, DEFAULT_EPS_SMOOTH).unwrap();
            assert!(r.total >= 1.0 - 1e-12, "{r:?}");
            assert!(r.log_second_moment_upper >= 2.0 * r.log_first_moment - n as f64 * LN_2);
            assert!((r.leading_term + r.lower_term - r.total).abs() < 1e-12 * r.total);
        }
        // the k = n/2 term alone
        let n = 10;
        let mid = (log_binomial(n, 5).unwrap() - n as f64 * LN_2 + ratio_bound(5, n, 2, 0.5).unwrap()).exp();
        assert!((mid - 252.0 / 1024.0).abs() < 1e-14);
        assert!(second_moment_terms(3, 2, 0.5, DEFAULT_EPS_SMOOTH).is_err());
    }

    #[test]
    fn laplace_estimate_tracks_leading_term() {
        let r = second_moment_terms(400, 2, 0.05, DEFAULT_EPS_SMOOTH).unwrap();
        assert!((r.leading_laplace.unwrap() / r.leading_term - 1.0).abs() < 0.02, "{r:?}");
        assert_eq!(second_moment_terms(4, 2, 0.3, DEFAULT_EPS_SMOOTH).unwrap().leading_laplace, None);
    }
}
