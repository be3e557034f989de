//! Experiment commands. Each produces a [`Table`] in a deterministic order.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use log::{error, info, warn};

use goe_disc_core::discrepancy::{count_low_disc, disc_exact, disc_exact_parallel, disc_heuristic};
use goe_disc_core::laplace::laplace_error_decay;
use goe_disc_core::rmt::{sample_ensemble, MatrixEnsemble};
use goe_disc_core::theory::small_norm::MAX_EXACT_DIM;
use goe_disc_core::theory::{
    calibrate_xi, calibrate_xi_self_consistent, phi_exponent, predicted_delta, predicted_discrepancy,
    second_moment_terms, AuxParams, XiCalibration, DEFAULT_EPS_SMOOTH,
};
use goe_disc_core::RandomStream;

use crate::config::{ExperimentConfig, Mode};
use crate::error::Result;
use crate::output::{Field, Table};

pub const HEURISTIC_RESTARTS: usize = 20;
pub const HEURISTIC_MAX_ITERS: usize = 1000;
pub const SCALING_COLUMNS: [&str; 9] = ["n", "m", "trial", "seed", "disc", "predicted", "xi_hat", "ratio", "runtime_ms"];

/// Stream for the ensemble of trial `trial` at size `n`.
pub fn trial_stream(seed: u64, n: usize, trial: usize) -> RandomStream {
    RandomStream::new(seed, n as u64).substream(trial as u64)
}

pub fn trial_ensemble(seed: u64, n: usize, m: usize, trial: usize) -> Result<MatrixEnsemble> {
    Ok(sample_ensemble(n, m, &mut trial_stream(seed, n, trial).rng())?)
}

/// `xi` used for predictions: the self-consistent calibration at the middle
/// of the `n` range, or `xi = 1` when `m` is too large for exact probabilities.
pub fn scaling_xi(m: usize, n: &[usize]) -> Result<(f64, Option<XiCalibration>)> {
    if m > MAX_EXACT_DIM {
        warn!("m = {m} > {MAX_EXACT_DIM}: no exact calibration available, predictions use xi = 1");
        return Ok((1.0, None));
    }
    let lo = n.iter().copied().min().unwrap_or(1);
    let hi = n.iter().copied().max().unwrap_or(1);
    let cal = calibrate_xi_self_consistent(m, (lo + hi) / 2)?;
    if !cal.converged {
        warn!("xi calibration did not converge: {cal:?}");
    }
    info!(
        "xi_hat = {} (m = {m}, n_ref = {:?}, delta_ref = {})",
        cal.xi_hat, cal.n_ref, cal.delta_ref
    );
    Ok((cal.xi_hat, Some(cal)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct PredictionRecord {
    pub n: usize,
    pub m: usize,
    pub trial: usize,
    pub seed: u64,
    pub disc: f64,
    pub predicted: f64,
    pub xi_hat: f64,
    pub ratio: f64,
    pub runtime_ms: u64,
    /// `upper_bound` for heuristic searches.
    pub kind: Option<&'static str>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SizeSummary {
    pub n: usize,
    pub trials: usize,
    pub median_disc: f64,
    pub median_ratio: f64,
    /// Median of `log(disc / sqrt(nm))`.
    pub median_log_scaled: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingSummary {
    pub per_n: Vec<SizeSummary>,
    /// Least-squares slope of `median_log_scaled` against `n`.
    pub slope: f64,
    /// `-xi_hat log 4 / m^2`
    pub expected_slope: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingRun {
    pub xi_hat: f64,
    pub calibration: Option<XiCalibration>,
    pub records: Vec<PredictionRecord>,
    pub summary: ScalingSummary,
    pub failures: usize,
}

fn median(values: &mut [f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    values.sort_by(f64::total_cmp);
    let k = values.len();
    if k % 2 == 1 {
        values[k / 2]
    } else {
        0.5 * (values[k / 2 - 1] + values[k / 2])
    }
}

/// Ordinary least-squares slope of `y` on `x`.
pub fn ols_slope(x: &[f64], y: &[f64]) -> f64 {
    let k = x.len() as f64;
    let mx = x.iter().sum::<f64>() / k;
    let my = y.iter().sum::<f64>() / k;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

fn run_trial(cfg: &ExperimentConfig, n: usize, trial: usize, xi: f64) -> Result<PredictionRecord> {
    let start = Instant::now();
    let ens = trial_ensemble(cfg.seed, n, cfg.m, trial)?;
    let (disc, kind) = match cfg.mode {
        Mode::Exact => (disc_exact(&ens)?.value, None),
        Mode::Heuristic => {
            let stream = trial_stream(cfg.seed, n, trial).substream(1);
            let r = disc_heuristic(&ens, HEURISTIC_RESTARTS, HEURISTIC_MAX_ITERS, stream)?;
            (r.value, Some("upper_bound"))
        }
    };
    let predicted = predicted_discrepancy(n, cfg.m, xi, cfg.gamma);
    Ok(PredictionRecord {
        n,
        m: cfg.m,
        trial,
        seed: cfg.seed,
        disc,
        predicted,
        xi_hat: xi,
        ratio: disc / predicted,
        runtime_ms: if cfg.timing { start.elapsed().as_millis() as u64 } else { 0 },
        kind,
    })
}

/// One ensemble per `(n, trial)`, its discrepancy, and the prediction at the
/// calibrated `xi`. Trials run on `cfg.workers` threads; records come back in
/// `(n, trial)` order whatever the completion order.
pub fn run_scaling_experiment(cfg: &ExperimentConfig) -> Result<ScalingRun> {
    let (xi_hat, calibration) = scaling_xi(cfg.m, &cfg.n)?;
    let jobs: Vec<(usize, usize)> = cfg
        .n
        .iter()
        .flat_map(|&n| (0..cfg.trials).map(move |t| (n, t)))
        .collect();
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<Result<PredictionRecord>>>> = Mutex::new((0..jobs.len()).map(|_| None).collect());
    std::thread::scope(|s| {
        for _ in 0..cfg.workers.min(jobs.len()).max(1) {
            s.spawn(|| loop {
                let j = next.fetch_add(1, Ordering::Relaxed);
                let Some(&(n, trial)) = jobs.get(j) else { break };
                let r = run_trial(cfg, n, trial, xi_hat);
                slots.lock().expect("result lock")[j] = Some(r);
            });
        }
    });
    let mut records = Vec::with_capacity(jobs.len());
    let mut failures = 0;
    for (slot, &(n, trial)) in slots.into_inner().expect("result lock").into_iter().zip(&jobs) {
        match slot.expect("every job ran") {
            Ok(r) => records.push(r),
            Err(e) => {
                error!("trial {trial} at n = {n} failed: {e}");
                failures += 1;
                records.push(PredictionRecord {
                    n,
                    m: cfg.m,
                    trial,
                    seed: cfg.seed,
                    disc: f64::NAN,
                    predicted: predicted_discrepancy(n, cfg.m, xi_hat, cfg.gamma),
                    xi_hat,
                    ratio: f64::NAN,
                    runtime_ms: 0,
                    kind: (cfg.mode == Mode::Heuristic).then_some("upper_bound"),
                });
            }
        }
    }
    let summary = summarize(&records, cfg.m, xi_hat);
    Ok(ScalingRun {
        xi_hat,
        calibration,
        records,
        summary,
        failures,
    })
}

pub fn summarize(records: &[PredictionRecord], m: usize, xi_hat: f64) -> ScalingSummary {
    let mut sizes: Vec<usize> = records.iter().map(|r| r.n).collect();
    sizes.dedup();
    let per_n: Vec<SizeSummary> = sizes
        .iter()
        .map(|&n| {
            let rows: Vec<&PredictionRecord> = records.iter().filter(|r| r.n == n && r.disc.is_finite()).collect();
            let mut disc: Vec<f64> = rows.iter().map(|r| r.disc).collect();
            let mut ratio: Vec<f64> = rows.iter().map(|r| r.ratio).collect();
            let scale = ((n * m) as f64).sqrt();
            let mut logs: Vec<f64> = rows.iter().map(|r| (r.disc / scale).ln()).collect();
            SizeSummary {
                n,
                trials: rows.len(),
                median_disc: median(&mut disc),
                median_ratio: median(&mut ratio),
                median_log_scaled: median(&mut logs),
            }
        })
        .collect();
    let x: Vec<f64> = per_n.iter().map(|s| s.n as f64).collect();
    let y: Vec<f64> = per_n.iter().map(|s| s.median_log_scaled).collect();
    ScalingSummary {
        slope: if per_n.len() >= 2 { ols_slope(&x, &y) } else { f64::NAN },
        expected_slope: -xi_hat * 4f64.ln() / (m * m) as f64,
        per_n,
    }
}

pub fn scaling_table(run: &ScalingRun, heuristic: bool) -> Table {
    let mut columns = SCALING_COLUMNS.to_vec();
    if heuristic {
        columns.push("kind");
    }
    let mut t = Table::new(columns);
    for r in &run.records {
        let mut row: Vec<Field> = vec![
            r.n.into(),
            r.m.into(),
            r.trial.into(),
            r.seed.into(),
            r.disc.into(),
            r.predicted.into(),
            r.xi_hat.into(),
            r.ratio.into(),
            r.runtime_ms.into(),
        ];
        if heuristic {
            row.push(r.kind.unwrap_or("exact").into());
        }
        t.push(row);
    }
    t
}

pub fn summary_table(summary: &ScalingSummary) -> Table {
    let mut t = Table::new(vec!["n", "trials", "median_disc", "median_ratio", "median_log_scaled", "slope", "expected_slope"]);
    for s in &summary.per_n {
        t.push(vec![
            s.n.into(),
            s.trials.into(),
            s.median_disc.into(),
            s.median_ratio.into(),
            s.median_log_scaled.into(),
            summary.slope.into(),
            summary.expected_slope.into(),
        ]);
    }
    t
}

pub fn sample(cfg: &ExperimentConfig) -> Result<Table> {
    let mut t = Table::new(vec!["n", "trial", "matrix", "row", "col", "value"]);
    for &n in &cfg.n {
        for trial in 0..cfg.trials {
            let ens = trial_ensemble(cfg.seed, n, cfg.m, trial)?;
            for (k, a) in ens.matrices().iter().enumerate() {
                for i in 0..cfg.m {
                    for j in i..cfg.m {
                        t.push(vec![n.into(), trial.into(), k.into(), i.into(), j.into(), a.get(i, j).into()]);
                    }
                }
            }
        }
    }
    Ok(t)
}

pub fn disc(cfg: &ExperimentConfig) -> Result<Table> {
    let mut columns = vec!["n", "m", "trial", "seed", "disc", "explored", "mode", "argmin"];
    if cfg.epsilon.is_some() {
        columns.push("count");
    }
    let mut t = Table::new(columns);
    for &n in &cfg.n {
        for trial in 0..cfg.trials {
            let ens = trial_ensemble(cfg.seed, n, cfg.m, trial)?;
            let r = match cfg.mode {
                Mode::Exact => disc_exact_parallel(&ens, cfg.workers)?,
                Mode::Heuristic => disc_heuristic(
                    &ens,
                    HEURISTIC_RESTARTS,
                    HEURISTIC_MAX_ITERS,
                    trial_stream(cfg.seed, n, trial).substream(1),
                )?,
            };
            let mut row: Vec<Field> = vec![
                n.into(),
                cfg.m.into(),
                trial.into(),
                cfg.seed.into(),
                r.value.into(),
                r.explored.into(),
                r.mode.to_string().into(),
                r.argmin.to_sign_string().into(),
            ];
            if let Some(eps) = cfg.epsilon {
                row.push(count_low_disc(&ens, eps)?.count.into());
            }
            t.push(row);
        }
    }
    Ok(t)
}

pub fn predict(cfg: &ExperimentConfig) -> Result<Table> {
    let (xi, _) = scaling_xi(cfg.m, &cfg.n)?;
    let mut t = Table::new(vec!["n", "m", "xi_hat", "delta", "lower", "upper"]);
    for &n in &cfg.n {
        t.push(vec![
            n.into(),
            cfg.m.into(),
            xi.into(),
            predicted_delta(n, cfg.m, xi, cfg.gamma).into(),
            predicted_discrepancy(n, cfg.m, xi, cfg.beta).into(),
            predicted_discrepancy(n, cfg.m, xi, cfg.gamma).into(),
        ]);
    }
    Ok(t)
}

fn calibration_row(c: &XiCalibration) -> Vec<Field> {
    vec![
        c.m.into(),
        c.n_ref.map_or(Field::Text(String::new()), Field::from),
        c.delta_ref.into(),
        c.xi_hat.into(),
        c.iterations.into(),
        c.converged.into(),
    ]
}

pub fn calibrate(cfg: &ExperimentConfig) -> Result<Table> {
    let mut t = Table::new(vec!["m", "n_ref", "delta_ref", "xi_hat", "iterations", "converged"]);
    match cfg.delta {
        Some(d) => t.push(calibration_row(&calibrate_xi(cfg.m, d)?)),
        None => {
            for &n in &cfg.n {
                t.push(calibration_row(&calibrate_xi_self_consistent(cfg.m, n)?));
            }
        }
    }
    Ok(t)
}

pub fn moments(cfg: &ExperimentConfig) -> Result<Table> {
    let mut t = Table::new(vec![
        "n",
        "m",
        "delta",
        "epsilon",
        "xi_hat",
        "log_first_moment",
        "log_second_moment_upper",
        "total",
        "leading_term",
        "lower_term",
        "leading_laplace",
    ]);
    for &n in &cfg.n {
        let (delta, xi) = match (cfg.delta, cfg.epsilon) {
            (Some(d), _) => (d, f64::NAN),
            (None, Some(eps)) => (eps / (n as f64).sqrt(), f64::NAN),
            (None, None) => {
                let xi = calibrate_xi_self_consistent(cfg.m, n)?.xi_hat;
                (predicted_delta(n, cfg.m, xi, cfg.gamma), xi)
            }
        };
        let r = second_moment_terms(n, cfg.m, delta, DEFAULT_EPS_SMOOTH)?;
        t.push(vec![
            n.into(),
            cfg.m.into(),
            delta.into(),
            r.epsilon.into(),
            xi.into(),
            r.log_first_moment.into(),
            r.log_second_moment_upper.into(),
            r.total.into(),
            r.leading_term.into(),
            r.lower_term.into(),
            r.leading_laplace.unwrap_or(f64::NAN).into(),
        ]);
    }
    Ok(t)
}

pub fn laplace(cfg: &ExperimentConfig) -> Result<Table> {
    let delta = cfg.delta.unwrap_or(0.1);
    let n_list: Vec<f64> = cfg.n.iter().map(|&n| n as f64).collect();
    let m = cfg.m;
    let points = laplace_error_decay(
        |n| phi_exponent(AuxParams::new(n as usize, m, delta, DEFAULT_EPS_SMOOTH)?),
        &n_list,
    )?;
    let mut t = Table::new(vec![
        "n",
        "m",
        "delta",
        "closed_form_log",
        "quadrature_log",
        "rel_error",
        "hypotheses_ok",
    ]);
    for p in points {
        t.push(vec![
            (p.n as usize).into(),
            m.into(),
            delta.into(),
            p.closed_form_log.into(),
            p.quadrature_log.into(),
            p.rel_error.into(),
            p.hypotheses.ok.into(),
        ]);
    }
    Ok(t)
}
