use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use serde::Serialize;

use goe_disc_core::discrepancy::DEFAULT_CAP;
use goe_disc_core::theory::small_norm::MAX_EXACT_DIM;

use crate::error::{HarnessError, Result};
use crate::output::Format;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Sample,
    Disc,
    Predict,
    CalibrateXi,
    Moments,
    Laplace,
    Verify,
    Scaling,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Heuristic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Densities,
    Selberg,
    Moments,
    Ratio,
    Laplace,
    Eigensolver,
}

impl Suite {
    pub const ALL: [Suite; 6] = [
        Suite::Densities,
        Suite::Selberg,
        Suite::Moments,
        Suite::Ratio,
        Suite::Laplace,
        Suite::Eigensolver,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Densities => "densities",
            Suite::Selberg => "selberg",
            Suite::Moments => "moments",
            Suite::Ratio => "ratio",
            Suite::Laplace => "laplace",
            Suite::Eigensolver => "eigensolver",
        }
    }
}

/// Command-line arguments as typed by the user.
#[derive(Debug, Parser)]
#[command(name = "goe-disc", version, about = "Discrepancy of GOE random matrices: sampling, theory and search")]
pub struct Cli {
    #[arg(value_enum)]
    pub command: Command,
    /// Matrix dimension.
    #[arg(long)]
    pub m: Option<usize>,
    /// Number of matrices; a comma-separated list runs each value.
    #[arg(long, value_delimiter = ',')]
    pub n: Vec<usize>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Norm threshold for the normalized sum (`moments`, `calibrate-xi`, `laplace`).
    #[arg(long, allow_negative_numbers = true)]
    pub delta: Option<f64>,
    /// Counting threshold for `S_n(eps)` (`disc`, `moments`).
    #[arg(long, allow_negative_numbers = true)]
    pub epsilon: Option<f64>,
    /// Upper constant of the predicted scale.
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub gamma: f64,
    /// Lower constant of the predicted scale.
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub beta: f64,
    #[arg(long, value_enum, default_value_t = Mode::Exact)]
    pub mode: Mode,
    #[arg(long, env = "GOE_DISC_WORKERS")]
    pub workers: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Verification suite; all suites when omitted.
    #[arg(long, value_enum)]
    pub suite: Option<Suite>,
    /// Record wall-clock runtimes (makes output non-reproducible).
    #[arg(long)]
    pub timing: bool,
}

/// Fully resolved configuration; printed before every run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub command: Command,
    pub m: usize,
    pub n: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    pub delta: Option<f64>,
    pub epsilon: Option<f64>,
    pub gamma: f64,
    pub beta: f64,
    pub mode: Mode,
    pub workers: usize,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub suite: Option<Suite>,
    pub timing: bool,
}

fn default_n(command: Command) -> Vec<usize> {
    match command {
        Command::Sample => vec![4],
        Command::Disc => vec![12],
        Command::CalibrateXi => vec![18],
        Command::Moments => vec![40, 100, 200],
        Command::Laplace => vec![1_000, 10_000, 100_000],
        Command::Predict | Command::Scaling | Command::Verify => vec![12, 16, 20, 24],
    }
}

fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn invalid(msg: impl Into<String>) -> HarnessError {
    HarnessError::Validation(msg.into())
}

fn positive(name: &str, v: Option<f64>) -> Result<()> {
    match v {
        Some(x) if !(x > 0.0 && x.is_finite()) => Err(invalid(format!("--{name} must be positive and finite, got {x}"))),
        _ => Ok(()),
    }
}

impl ExperimentConfig {
    /// Fills defaults and checks every parameter against the preconditions
    /// of the command it feeds.
    pub fn resolve(cli: Cli) -> Result<Self> {
        let command = cli.command;
        let cfg = ExperimentConfig {
            command,
            m: cli.m.unwrap_or(2),
            n: if cli.n.is_empty() { default_n(command) } else { cli.n },
            trials: cli.trials.unwrap_or(match command {
                Command::Scaling => 50,
                _ => 1,
            }),
            seed: cli.seed,
            delta: cli.delta,
            epsilon: cli.epsilon,
            gamma: cli.gamma,
            beta: cli.beta,
            mode: cli.mode,
            workers: cli.workers.unwrap_or_else(default_workers),
            out: cli.out,
            format: cli.format,
            suite: cli.suite,
            timing: cli.timing,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.m == 0 {
            return Err(invalid("--m must be at least 1"));
        }
        if self.n.contains(&0) {
            return Err(invalid("every --n value must be at least 1"));
        }
        if self.trials == 0 {
            return Err(invalid("--trials must be at least 1"));
        }
        if self.workers == 0 {
            return Err(invalid("--workers must be at least 1"));
        }
        positive("delta", self.delta)?;
        positive("epsilon", self.epsilon)?;
        positive("gamma", Some(self.gamma))?;
        positive("beta", Some(self.beta))?;
        let exact_search = matches!(self.command, Command::Disc | Command::Scaling) && self.mode == Mode::Exact;
        if exact_search || (self.command == Command::Disc && self.epsilon.is_some()) {
            if let Some(&n) = self.n.iter().find(|&&n| n > DEFAULT_CAP) {
                return Err(invalid(format!(
                    "n = {n} exceeds the exhaustive-search cap of {DEFAULT_CAP}; use --mode heuristic"
                )));
            }
        }
        if matches!(self.command, Command::CalibrateXi | Command::Moments) && self.m > MAX_EXACT_DIM {
            return Err(invalid(format!(
                "this command needs exact small-norm probabilities, available for m <= {MAX_EXACT_DIM}"
            )));
        }
        if self.command == Command::Moments && self.n.iter().any(|&n| n < 4) {
            return Err(invalid("moments needs n >= 4"));
        }
        if self.command == Command::CalibrateXi {
            if let Some(d) = self.delta {
                let boundary = goe_disc_core::theory::xi_boundary(self.m);
                if d >= boundary - 1e-6 {
                    return Err(invalid(format!("--delta must be below 2 sqrt(m) e^(-3/4) = {boundary}")));
                }
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }
}
