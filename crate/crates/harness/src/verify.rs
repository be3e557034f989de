//! Named verification suites. Each check records the measured value, its
//! target and tolerance; failures are collected, never short-circuited.

use std::f64::consts::LN_2;

use rand::Rng;

use goe_disc_core::densities::{
    eigen_log_density, eigen_pair_log_density, goe_matrix_log_density, log_selberg_unit_cube,
    pair_matrix_log_density, selberg_unit_cube, vandermonde,
};
use goe_disc_core::discrepancy::count_low_disc;
use goe_disc_core::laplace::{laplace_error_decay, quadratic_exponent};
use goe_disc_core::quadrature::{integrate_nested, integrate_ordered_box, Quadrature};
use goe_disc_core::rmt::{
    sample_correlated_pair, sample_ensemble, sample_goe, spectral_norm, symmetric_eigenvalues, SymmetricMatrix,
    DEFAULT_TOL,
};
use goe_disc_core::theory::aux::{phi_at_half, phi_dd_at_half};
use goe_disc_core::theory::small_norm::{delta_for_probability, McEstimate};
use goe_disc_core::theory::{
    aux_functions, binomial_log_approx, binomial_tail_bound, calibrate_xi_self_consistent, first_moment_log,
    log_binomial, log_remainder, log_small_norm_prob_exact, phi_exponent, predicted_delta, ratio_bound,
    ratio_bound_tight_point, rho_k, second_moment_terms, AuxParams, DEFAULT_EPS_SMOOTH,
};
use goe_disc_core::RandomStream;

use crate::config::Suite;
use crate::error::{HarnessError, Result};
use crate::output::Table;

const VERIFY_SEED: u64 = 20_240_917;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub measured: f64,
    pub target: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl Check {
    /// `|measured - target| <= tolerance`
    pub fn near(name: impl Into<String>, measured: f64, target: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            measured,
            target,
            tolerance,
            passed: (measured - target).abs() <= tolerance,
        }
    }

    /// `measured <= bound`
    pub fn at_most(name: impl Into<String>, measured: f64, bound: f64) -> Self {
        Self {
            name: name.into(),
            measured,
            target: bound,
            tolerance: 0.0,
            passed: measured <= bound,
        }
    }

    /// `measured >= bound`
    pub fn at_least(name: impl Into<String>, measured: f64, bound: f64) -> Self {
        Self {
            name: name.into(),
            measured,
            target: bound,
            tolerance: 0.0,
            passed: measured >= bound,
        }
    }

    pub fn holds(name: impl Into<String>, ok: bool) -> Self {
        Self {
            name: name.into(),
            measured: if ok { 1.0 } else { 0.0 },
            target: 1.0,
            tolerance: 0.0,
            passed: ok,
        }
    }

    pub fn line(&self) -> String {
        format!(
            "{} {}: measured {:.6e}, target {:.6e}, tolerance {:.1e}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.measured,
            self.target,
            self.tolerance
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub suite: Suite,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

pub fn report_table(reports: &[SuiteReport]) -> Table {
    let mut t = Table::new(vec!["suite", "check", "measured", "target", "tolerance", "passed"]);
    for r in reports {
        for c in &r.checks {
            t.push(vec![
                r.suite.name().into(),
                c.name.clone().into(),
                c.measured.into(),
                c.target.into(),
                c.tolerance.into(),
                c.passed.into(),
            ]);
        }
    }
    t
}

fn failure(c: &goe_disc_core::Error, name: &str) -> Check {
    log::error!("{name}: {c}");
    Check::holds(format!("{name} ({c})"), false)
}

macro_rules! try_check {
    ($name:expr, $e:expr) => {
        match $e {
            Ok(v) => v,
            Err(err) => return vec![failure(&err, $name)],
        }
    };
}

pub fn run_verify(suite: Suite) -> SuiteReport {
    let checks = match suite {
        Suite::Densities => [normalization_checks(), correlated_pair_checks(), invariance_checks()].concat(),
        Suite::Selberg => selberg_checks(),
        Suite::Moments => [first_moment_checks(), small_norm_checks(), second_moment_checks()].concat(),
        Suite::Ratio => [ratio_checks(), binomial_checks()].concat(),
        Suite::Laplace => [laplace_method_checks(), phi_algebra_checks()].concat(),
        Suite::Eigensolver => [eigensolver_checks(), spectral_norm_band_check()].concat(),
    };
    SuiteReport { suite, checks }
}

/// Runs the suites and fails with exit status 3 if any check failed.
pub fn run_suites(suites: &[Suite]) -> Result<Vec<SuiteReport>> {
    Ok(suites.iter().map(|&s| run_verify(s)).collect())
}

pub fn require_pass(reports: &[SuiteReport]) -> Result<()> {
    let failed: Vec<String> = reports
        .iter()
        .flat_map(|r| r.checks.iter().filter(|c| !c.passed).map(move |c| format!("{}/{}", r.suite.name(), c.name)))
        .collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(HarnessError::SuiteFailed(failed.join(", ")))
    }
}

/// Selberg's closed form against quadrature (m = 1, 2) and Monte Carlo (m = 3).
pub fn selberg_checks() -> Vec<Check> {
    let mut out = Vec::new();
    out.push(Check::near("selberg m=1", try_check!("selberg m=1", selberg_unit_cube(1)), 1.0, 1e-12));

    let q = Quadrature::new(1e-14, 1e-14);
    // |x - y| over the square is twice (y - x) over the wedge x <= y
    let e = integrate_nested(&[q, q], &|level, p| if level == 0 { (0.0, 1.0) } else { (p[0], 1.0) }, &|p| p[1] - p[0]);
    out.push(Check::near(
        "selberg m=2 vs quadrature of |x-y|/2",
        try_check!("selberg m=2", selberg_unit_cube(2)),
        e.value,
        1e-9,
    ));
    out.push(Check::near("selberg m=2 equals 1/6", selberg_unit_cube(2).unwrap_or(f64::NAN), 1.0 / 6.0, 1e-12));

    let samples = 10_000_000u64;
    let mut rng = RandomStream::new(VERIFY_SEED, 1).rng();
    let (mut sum, mut sum_sq) = (0.0, 0.0);
    for _ in 0..samples {
        let t: [f64; 3] = [rng.random(), rng.random(), rng.random()];
        let v = vandermonde(&t).abs() / 6.0;
        sum += v;
        sum_sq += v * v;
    }
    let mean = sum / samples as f64;
    let se = ((sum_sq / samples as f64 - mean * mean) / samples as f64).sqrt();
    out.push(Check::near(
        "selberg m=3 vs Monte Carlo (3 standard errors)",
        mean,
        selberg_unit_cube(3).unwrap_or(f64::NAN),
        3.0 * se,
    ));

    let logs: Vec<f64> = (1..=10).map(|m| log_selberg_unit_cube(m).unwrap_or(f64::NAN)).collect();
    out.push(Check::holds(
        "selberg strictly decreasing for m = 1..10",
        logs.windows(2).all(|w| w[1] < w[0]),
    ));
    out
}

/// Total mass of the four closed-form densities by adaptive quadrature.
pub fn normalization_checks() -> Vec<Check> {
    let mut out = Vec::new();
    let q = Quadrature::new(1e-14, 1e-13);
    let e = q.estimate(
        |x| {
            let a = SymmetricMatrix::from_diagonal(&[x]).expect("1x1");
            goe_matrix_log_density(&a).map_or(f64::NAN, |d| d.density())
        },
        -20.0,
        20.0,
    );
    out.push(Check::near("matrix density m=1 mass", e.value, 1.0, 1e-10));

    let q = Quadrature::new(1e-12, 1e-10);
    let e = integrate_ordered_box(q, 2, -20.0, 20.0, &|l| {
        eigen_log_density(l).map_or(f64::NAN, |d| d.density())
    });
    out.push(Check::near("eigenvalue density m=2 mass", e.value, 1.0, 1e-6));

    let q = Quadrature::new(1e-13, 1e-12);
    let e = integrate_nested(&[q, q], &|_, _| (-20.0, 20.0), &|p| {
        let x = SymmetricMatrix::from_diagonal(&p[..1]).expect("1x1");
        let y = SymmetricMatrix::from_diagonal(&p[1..]).expect("1x1");
        pair_matrix_log_density(&x, &y, 0.5).map_or(f64::NAN, |d| d.density())
    });
    out.push(Check::near("pair matrix density m=1 rho=0.5 mass", e.value, 1.0, 1e-8));

    let q = Quadrature::new(1e-9, 1e-7);
    let e = integrate_nested(
        &[q, q, q, q],
        &|level, p| match level {
            1 => (p[0], 15.0),
            3 => (p[2], 15.0),
            _ => (-15.0, 15.0),
        },
        &|p| eigen_pair_log_density(&p[..2], &p[2..], 0.5).map_or(f64::NAN, |d| d.density()),
    );
    out.push(Check::near("pair eigenvalue density m=2 rho=0.5 mass", e.value, 1.0, 1e-4));
    out.push(Check::near(
        "pair eigenvalue density m=2 rho=0.5 mass vs its exact value",
        e.value,
        PAIR_EIGEN_MASS_M2_RHO_HALF,
        1e-4,
    ));
    out.extend(pair_eigen_box_probability_check());
    out
}

/// Exact integral of the pair eigenvalue formula over the ordered wedge at
/// `m = 2`, `rho = 1/2`, from a 30-digit evaluation in mean and spread
/// coordinates. The formula uses `<lam, mu>` in place of the orbital average
/// of `exp(rho tr(X Q Y Q^T))`, so its total mass exceeds one.
pub const PAIR_EIGEN_MASS_M2_RHO_HALF: f64 = 2.209_199_576_156_145_2;

/// `P(max|lam| <= 1, max|mu| <= 1)` at `m = 2`, `rho = 1/2` from the pair
/// eigenvalue formula against 10^6 sampled pairs.
pub fn pair_eigen_box_probability_check() -> Vec<Check> {
    let (rho, draws) = (0.5, 1_000_000u64);
    let q = Quadrature::new(1e-12, 1e-10);
    let e = integrate_nested(
        &[q, q, q, q],
        &|level, p| match level {
            1 => (p[0], 1.0),
            3 => (p[2], 1.0),
            _ => (-1.0, 1.0),
        },
        &|p| eigen_pair_log_density(&p[..2], &p[2..], rho).map_or(f64::NAN, |d| d.density()),
    );
    let mut rng = RandomStream::new(VERIFY_SEED, 2).rng();
    let mut hits = 0u64;
    for _ in 0..draws {
        let (x, y) = try_check!("pair box", sample_correlated_pair(2, rho, &mut rng));
        if try_check!("pair box", spectral_norm(&x)) <= 1.0 && try_check!("pair box", spectral_norm(&y)) <= 1.0 {
            hits += 1;
        }
    }
    let mc = McEstimate::from_hits(hits, draws);
    vec![Check::near(
        "pair eigenvalue box probability m=2 rho=0.5 vs Monte Carlo (3 standard errors)",
        e.value,
        mc.p,
        3.0 * mc.std_error,
    )]
}

/// Entry correlations and marginal variances of correlated pairs.
pub fn correlated_pair_checks() -> Vec<Check> {
    let (m, rho, draws) = (3usize, 0.5, 200_000usize);
    let mut rng = RandomStream::new(VERIFY_SEED, 3).rng();
    let cells = m * (m + 1) / 2;
    let mut sx = vec![0.0; cells];
    let mut sy = vec![0.0; cells];
    let mut sxx = vec![0.0; cells];
    let mut syy = vec![0.0; cells];
    let mut sxy = vec![0.0; cells];
    for _ in 0..draws {
        let (x, y) = try_check!("correlated pair", sample_correlated_pair(m, rho, &mut rng));
        for (c, (a, b)) in x.packed().iter().zip(y.packed()).enumerate() {
            sx[c] += a;
            sy[c] += b;
            sxx[c] += a * a;
            syy[c] += b * b;
            sxy[c] += a * b;
        }
    }
    let k = draws as f64;
    let mut out = Vec::new();
    let mut c = 0;
    for i in 0..m {
        for j in i..m {
            let (mx, my) = (sx[c] / k, sy[c] / k);
            let vx = sxx[c] / k - mx * mx;
            let vy = syy[c] / k - my * my;
            let corr = (sxy[c] / k - mx * my) / (vx * vy).sqrt();
            let want_var = if i == j { 2.0 } else { 1.0 };
            out.push(Check::near(format!("corr(X_{i}{j}, Y_{i}{j})"), corr, rho, 0.02));
            out.push(Check::near(format!("var X_{i}{j}"), vx, want_var, 0.05));
            out.push(Check::near(format!("var Y_{i}{j}"), vy, want_var, 0.05));
            c += 1;
        }
    }
    out
}

fn rotation(theta: f64) -> Vec<Vec<f64>> {
    vec![vec![theta.cos(), -theta.sin()], vec![theta.sin(), theta.cos()]]
}

pub fn invariance_checks() -> Vec<Check> {
    let mut rng = RandomStream::new(VERIFY_SEED, 4).rng();
    let x = try_check!("invariance", sample_goe(2, &mut rng));
    let y = try_check!("invariance", sample_goe(2, &mut rng));
    let rotated = try_check!("invariance", x.conjugate(&rotation(std::f64::consts::PI / 6.0)));
    let a = try_check!("invariance", goe_matrix_log_density(&x)).log_value();
    let b = try_check!("invariance", goe_matrix_log_density(&rotated)).log_value();
    let pair0 = try_check!("factorization", pair_matrix_log_density(&x, &y, 0.0)).log_value();
    let split = a + try_check!("factorization", goe_matrix_log_density(&y)).log_value();
    let lam = [-0.7, 0.2];
    let mu = [-0.1, 1.3];
    let epair0 = try_check!("factorization", eigen_pair_log_density(&lam, &mu, 0.0)).log_value();
    let esplit = try_check!("factorization", eigen_log_density(&lam)).log_value()
        + try_check!("factorization", eigen_log_density(&mu)).log_value();
    vec![
        Check::near("matrix density invariant under 30 degree rotation", b, a, 1e-12 * a.abs()),
        Check::holds("pair matrix density factorizes at rho=0", pair0 == split),
        Check::holds("pair eigenvalue density factorizes at rho=0", epair0 == esplit),
    ]
}

/// `P(||X|| <= eps / sqrt(10)) = 0.01`: mean of `S_10(eps)` over 2000
/// ensembles against `2^10 * 0.01`.
pub fn first_moment_checks() -> Vec<Check> {
    let (n, m, p, ensembles) = (10usize, 2usize, 0.01, 2000usize);
    let delta = try_check!("first moment", delta_for_probability(m, p));
    let eps = delta * (n as f64).sqrt();
    let mut total = 0u64;
    for t in 0..ensembles {
        let stream = RandomStream::new(VERIFY_SEED, 5).substream(t as u64);
        let ens = try_check!("first moment", sample_ensemble(n, m, &mut stream.rng()));
        total += try_check!("first moment", count_low_disc(&ens, eps)).count;
    }
    let mean = total as f64 / ensembles as f64;
    let formula = try_check!("first moment", first_moment_log(n, m, eps)).exp();
    vec![
        Check::near("first moment formula equals 2^10 * 0.01", formula, 10.24, 1e-8),
        Check::near("mean S_10(eps) over 2000 ensembles", mean, formula, 0.1 * formula),
    ]
}

pub fn small_norm_checks() -> Vec<Check> {
    let mut out = Vec::new();
    for m in [1usize, 2] {
        let vals: Vec<f64> = (1..=40)
            .map(|i| log_small_norm_prob_exact(m, 0.25 * i as f64).unwrap_or(f64::NAN))
            .collect();
        out.push(Check::holds(
            format!("small-norm probability nondecreasing in delta, m={m}"),
            vals.windows(2).all(|w| w[1] >= w[0]),
        ));
    }
    let v = first_moment_log(12, 2, 1e3 * 12f64.sqrt()).unwrap_or(f64::NAN);
    out.push(Check::near("first moment at delta = 1000 equals n log 2", v, 12.0 * LN_2, 1e-9));
    out
}

/// Moment sums at `m = 2` with `delta` at the predicted scale (`gamma = 1`)
/// for `n` in `{40, 100, 200}`.
pub fn second_moment_checks() -> Vec<Check> {
    let m = 2;
    let mut out = Vec::new();
    let mut leading = Vec::new();
    let mut last_lower = (f64::NAN, f64::NAN);
    for n in [40usize, 100, 200] {
        let cal = try_check!("second moment", calibrate_xi_self_consistent(m, n));
        let delta = predicted_delta(n, m, cal.xi_hat, 1.0);
        let r = try_check!("second moment", second_moment_terms(n, m, delta, DEFAULT_EPS_SMOOTH));
        out.push(Check::at_least(format!("second-moment sum >= 1 at n={n}"), r.total, 1.0));
        leading.push(r.leading_term);
        // gamma = 1, so 2 gamma^(-m^2 / (2 xi)) = 2
        last_lower = (r.lower_term, 2.0 + 0.05);
    }
    out.push(Check::at_least(
        "leading term >= 1 at every n",
        leading.iter().copied().fold(f64::INFINITY, f64::min),
        1.0,
    ));
    out.push(Check::holds(
        "leading term decreasing over n = 40, 100, 200",
        leading.windows(2).all(|w| w[1] < w[0]),
    ));
    out.push(Check::at_most("lower term at n=200 <= 2 + 0.05", last_lower.0, last_lower.1));
    out
}

/// Monte Carlo joint-to-marginal ratio against the closed-form bound, and the
/// grid oracle for the boundary maximizer, at `n = 10`, `m = 2`, `k = 2`,
/// `delta = 0.5`.
pub fn ratio_checks() -> Vec<Check> {
    let (n, m, k, delta, draws) = (10usize, 2usize, 2usize, 0.5, 1_000_000u64);
    let rho = try_check!("ratio", rho_k(k, n));
    let bound = try_check!("ratio", ratio_bound(k, n, m, delta));
    let p = try_check!("ratio", log_small_norm_prob_exact(m, delta)).exp();
    let mut rng = RandomStream::new(VERIFY_SEED, 6).rng();
    let mut joint = 0u64;
    for _ in 0..draws {
        let (x, y) = try_check!("ratio", sample_correlated_pair(m, rho, &mut rng));
        if try_check!("ratio", spectral_norm(&x)) <= delta && try_check!("ratio", spectral_norm(&y)) <= delta {
            joint += 1;
        }
    }
    let pj = joint as f64 / draws as f64;
    let se = (pj * (1.0 - pj) / draws as f64).sqrt() / (p * p);
    let ratio = pj / (p * p);
    // one-sided 95% lower confidence limit of the ratio
    let lower_limit = ratio - 1.645 * se;

    let g: Vec<f64> = (0..41).map(|i| -delta + 2.0 * delta * i as f64 / 40.0).collect();
    let mut best = f64::NEG_INFINITY;
    for a in 0..41 {
        for b in a..41 {
            for c in 0..41 {
                for d in c..41 {
                    if let Ok(r) = log_remainder(&[g[a], g[b]], &[g[c], g[d]], rho) {
                        best = best.max(r);
                    }
                }
            }
        }
    }
    let (_, tight) = try_check!("ratio", ratio_bound_tight_point(k, n, delta, m));

    let mut symmetric = true;
    let mut nonnegative = true;
    for nn in 2..=60 {
        for kk in 1..nn {
            let b = ratio_bound(kk, nn, m, delta).unwrap_or(f64::NAN);
            symmetric &= b.to_bits() == ratio_bound(nn - kk, nn, m, delta).unwrap_or(f64::NAN).to_bits();
            nonnegative &= b >= 0.0;
        }
    }
    vec![
        Check::at_most("MC ratio 95% lower limit <= exp(bound)", lower_limit, bound.exp()),
        Check::near("grid maximum of r_k equals boundary value", best, tight, 1e-9),
        Check::holds("ratio bound symmetric under k -> n-k", symmetric),
        Check::holds("ratio bound nonnegative", nonnegative),
    ]
}

fn binom_u128(n: u32, k: u32) -> u128 {
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Exhaustive binomial-sum bound for `n <= 30` and the relative error of the
/// Stirling approximation at `n = 10` and `n = 100`.
pub fn binomial_checks() -> Vec<Check> {
    let mut worst_margin = f64::INFINITY;
    for n in 1..=30u32 {
        let mut partial = 1u128;
        for t in 1..=n {
            partial += binom_u128(n, t);
            let bound = binomial_tail_bound(n as usize, t as usize).unwrap_or(f64::NAN);
            worst_margin = worst_margin.min(bound - (partial as f64).ln());
        }
    }
    let rel = |n: usize, k: usize| {
        let approx = binomial_log_approx(n, k).unwrap_or(f64::NAN);
        let exact = log_binomial(n, k).unwrap_or(f64::NAN);
        (approx - exact).exp_m1().abs()
    };
    let worst10 = (3..=7).map(|k| rel(10, k)).fold(0.0, f64::max);
    let worst100 = (25..=75).map(|k| rel(100, k)).fold(0.0, f64::max);
    vec![
        Check::at_least("binomial-sum bound margin, all n <= 30, t <= n", worst_margin, 0.0),
        Check::at_most("binomial approximation max rel. error, n=10, k in [3,7]", worst10, 0.03),
        Check::at_most("binomial approximation max rel. error, n=100, k in [25,75]", worst100, 0.005),
    ]
}

/// Closed form against quadrature for a quadratic exponent and for the
/// `phi_n` family at `m = 2`, `delta = 0.1`.
pub fn laplace_method_checks() -> Vec<Check> {
    let mut out = Vec::new();
    let wide = try_check!("laplace", laplace_error_decay(|_| quadratic_exponent(0.0, 1.0), &[1e4]));
    out.push(Check::at_most("quadratic exponent on [0,1], n=1e4: rel. error", wide[0].rel_error, 0.005));
    let narrow = try_check!(
        "laplace",
        laplace_error_decay(|_| quadratic_exponent(0.47, 0.53), &[1e2, 1e3, 1e4])
    );
    out.push(Check::holds(
        "quadratic exponent on [0.47,0.53]: errors strictly decrease over n = 1e2, 1e3, 1e4",
        narrow.windows(2).all(|w| w[1].rel_error < w[0].rel_error),
    ));
    out.push(Check::at_most("quadratic exponent on [0.47,0.53], n=1e4: rel. error", narrow[2].rel_error, 0.005));
    let family = try_check!(
        "laplace",
        laplace_error_decay(
            |n| phi_exponent(AuxParams::new(n as usize, 2, 0.1, DEFAULT_EPS_SMOOTH)?),
            &[1e3, 1e4, 1e5],
        )
    );
    out.push(Check::holds(
        "phi_n family (m=2, delta=0.1): errors decrease over n = 1e3, 1e4, 1e5",
        family.windows(2).all(|w| w[1].rel_error < w[0].rel_error),
    ));
    out.push(Check::at_most("phi_n family, n=1e5: rel. error", family[2].rel_error, 0.01));
    out
}

/// Parameter sets `(n, m, delta)` used by the experiments: scaling sizes and
/// moment sizes at the predicted scale, and the Laplace family.
pub fn experiment_parameter_sets() -> Vec<(usize, usize, f64)> {
    let mut sets = Vec::new();
    for n in [12usize, 16, 18, 20, 24, 40, 100, 200] {
        if let Ok(cal) = calibrate_xi_self_consistent(2, n) {
            sets.push((n, 2, predicted_delta(n, 2, cal.xi_hat, 1.0)));
        }
    }
    for n in [1_000usize, 10_000, 100_000] {
        sets.push((n, 2, 0.1));
    }
    sets
}

fn second_difference(p: &AuxParams, x: f64) -> f64 {
    let phi = |x: f64| aux_functions(x, p).map_or(f64::NAN, |v| v.phi);
    let cd = |h: f64| (phi(x + h) - 2.0 * phi(x) + phi(x - h)) / (h * h);
    let h = 1e-4;
    (4.0 * cd(h) - cd(2.0 * h)) / 3.0
}

/// Closed forms at the peak, finite differences and grid concavity of `phi_n`.
pub fn phi_algebra_checks() -> Vec<Check> {
    let sets = experiment_parameter_sets();
    let mut worst_value = 0.0f64;
    let mut worst_curv = 0.0f64;
    let mut worst_fd = 0.0f64;
    let mut concave = true;
    for &(n, m, delta) in &sets {
        let p = try_check!("phi", AuxParams::new(n, m, delta, DEFAULT_EPS_SMOOTH));
        let half = try_check!("phi", aux_functions(0.5, &p));
        worst_value = worst_value.max(((half.phi - phi_at_half(&p)) / phi_at_half(&p)).abs());
        worst_curv = worst_curv.max(((half.phi_dd - phi_dd_at_half(&p)) / phi_dd_at_half(&p)).abs());
        for i in 0..21 {
            let x = 0.26 + 0.48 * i as f64 / 20.0;
            let v = try_check!("phi", aux_functions(x, &p));
            worst_fd = worst_fd.max((second_difference(&p, x) - v.phi_dd).abs());
        }
        for i in 0..=100 {
            let x = 0.25 + 0.5 * i as f64 / 100.0;
            concave &= try_check!("phi", aux_functions(x, &p)).phi_dd < 0.0;
        }
    }
    vec![
        Check::near("phi_n(1/2) vs closed form (rel.)", worst_value, 0.0, 1e-12),
        Check::near("phi_n''(1/2) vs closed form (rel.)", worst_curv, 0.0, 1e-12),
        Check::at_most("phi_n'' vs finite differences, 21 points", worst_fd, 1e-6),
        Check::holds("phi_n'' < 0 on a 101-point grid for every experiment parameter set", concave),
    ]
}

pub fn eigensolver_checks() -> Vec<Check> {
    let mut out = Vec::new();
    let d = try_check!("eigen", SymmetricMatrix::from_diagonal(&[3.0, -5.0]));
    let s = try_check!("eigen", symmetric_eigenvalues(&d, DEFAULT_TOL));
    out.push(Check::holds("diag(3,-5) -> (-5, 3)", s.values() == [-5.0, 3.0]));
    let w = try_check!("eigen", SymmetricMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]));
    let s = try_check!("eigen", symmetric_eigenvalues(&w, DEFAULT_TOL));
    out.push(Check::near("[[0,1],[1,0]] smallest eigenvalue", s.values()[0], -1.0, 1e-15));

    let mut rng = RandomStream::new(VERIFY_SEED, 7).rng();
    let (mut worst_2x2, mut worst_trace, mut worst_homog) = (0.0f64, 0.0f64, 0.0f64);
    for i in 0..1000 {
        let m = [2usize, 3, 5, 10][i % 4];
        let a = try_check!("eigen", sample_goe(m, &mut rng));
        let s = try_check!("eigen", symmetric_eigenvalues(&a, DEFAULT_TOL));
        let scale = a.frobenius().max(1.0);
        worst_trace = worst_trace.max((s.sum() - a.trace()).abs() / (m as f64 * DEFAULT_TOL * scale));
        if m == 2 {
            let (x, y, z) = (a.get(0, 0), a.get(0, 1), a.get(1, 1));
            let t = (x + z) / 2.0;
            let r = ((x - z).powi(2) / 4.0 + y * y).sqrt();
            worst_2x2 = worst_2x2.max((s.values()[0] - (t - r)).abs().max((s.values()[1] - (t + r)).abs()));
        }
        let n1 = try_check!("eigen", spectral_norm(&a));
        for c in [-2.0, 0.5] {
            let n2 = try_check!("eigen", spectral_norm(&a.scaled(c)));
            worst_homog = worst_homog.max((n2 - c.abs() * n1).abs() / (c.abs() * n1));
        }
    }
    out.push(Check::at_most("2x2 eigenvalues vs quadratic formula", worst_2x2, 1e-10));
    out.push(Check::at_most("|sum(eigenvalues) - trace| / (m tol scale)", worst_trace, 1.0));
    out.push(Check::at_most("spectral norm homogeneity, c in {-2, 0.5} (rel.)", worst_homog, 1e-12));
    out
}

/// Median of `||X|| / sqrt(m)` over 50 GOE draws at `m = 100`.
pub fn spectral_norm_band_check() -> Vec<Check> {
    let mut rng = RandomStream::new(VERIFY_SEED, 8).rng();
    let mut norms = Vec::with_capacity(50);
    for _ in 0..50 {
        let a = try_check!("band", sample_goe(100, &mut rng));
        norms.push(try_check!("band", spectral_norm(&a)) / 10.0);
    }
    norms.sort_by(f64::total_cmp);
    let median = 0.5 * (norms[24] + norms[25]);
    vec![Check::near("median ||X||/sqrt(m), m=100, 50 draws", median, 2.0, 0.3)]
}
