//! Command dispatch for the `goe-disc` binary, usable in-process.

use std::ffi::OsString;
use std::io::Write;

use clap::Parser;

use crate::config::{Cli, Command, ExperimentConfig, Mode, Suite};
use crate::error::{HarnessError, Result};
use crate::experiments;
use crate::output::emit;
use crate::verify::{report_table, require_pass, run_suites};

/// Parses `args`, prints the resolved configuration to `stderr`, runs the
/// command and writes its table to `--out` or `stdout`. Returns the exit
/// status.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = write!(stderr, "{e}");
            return code;
        }
    };
    match execute(cli, stdout, stderr) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

fn execute(cli: Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<()> {
    let cfg = ExperimentConfig::resolve(cli)?;
    let _ = writeln!(stderr, "config: {}", cfg.to_json());
    let out = cfg.out.as_deref();
    match cfg.command {
        Command::Scaling => {
            let run = experiments::run_scaling_experiment(&cfg)?;
            emit(&experiments::scaling_table(&run, cfg.mode == Mode::Heuristic), cfg.format, out, stdout)?;
            let _ = write!(stderr, "{}", experiments::summary_table(&run.summary).to_csv());
            if run.failures > 0 {
                return Err(HarnessError::TrialsFailed(run.failures));
            }
        }
        Command::Verify => {
            let suites: Vec<Suite> = cfg.suite.map_or_else(|| Suite::ALL.to_vec(), |s| vec![s]);
            let reports = run_suites(&suites)?;
            for r in &reports {
                for c in &r.checks {
                    let _ = writeln!(stderr, "{}/{}", r.suite.name(), c.line());
                }
            }
            emit(&report_table(&reports), cfg.format, out, stdout)?;
            require_pass(&reports)?;
        }
        command => {
            let table = match command {
                Command::Sample => experiments::sample(&cfg)?,
                Command::Disc => experiments::disc(&cfg)?,
                Command::Predict => experiments::predict(&cfg)?,
                Command::CalibrateXi => experiments::calibrate(&cfg)?,
                Command::Moments => experiments::moments(&cfg)?,
                Command::Laplace => experiments::laplace(&cfg)?,
                Command::Scaling | Command::Verify => unreachable!("handled above"),
            };
            emit(&table, cfg.format, out, stdout)?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let argv = std::iter::once("goe-disc").chain(args.iter().copied());
        let code = run(argv, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn success_prints_config_first() {
        let (code, out, err) = call(&["disc", "--m", "2", "--n", "8", "--seed", "5", "--workers", "2"]);
        assert_eq!(code, 0, "{err}");
        assert!(err.starts_with("config: {"));
        assert!(err.contains("\"seed\":5"));
        assert!(out.lines().count() >= 2);
    }

    #[test]
    fn validation_errors_exit_two() {
        assert_eq!(call(&["disc", "--m", "0"]).0, 2);
        assert_eq!(call(&["disc", "--n", "40", "--mode", "exact"]).0, 2);
        assert_eq!(call(&["frobnicate"]).0, 2);
        assert_eq!(call(&["disc", "--seed", "minus-one"]).0, 2);
        assert_eq!(call(&["moments", "--delta", "-1"]).0, 2);
    }

    #[test]
    fn io_error_exits_four() {
        let dir = tempfile::tempdir().unwrap();
        let bad = dir.path().join("missing").join("out.csv");
        let (code, _, err) = call(&["sample", "--m", "2", "--out", bad.to_str().unwrap()]);
        assert_eq!(code, 4);
        assert!(err.contains("missing"));
    }

    #[test]
    fn reruns_are_byte_identical() {
        let dir = tempfile::tempdir().unwrap();
        let args = |p: &str| {
            vec![
                "scaling".to_string(),
                "--m=2".into(),
                "--n=8,10".into(),
                "--trials=3".into(),
                "--seed=11".into(),
                format!("--out={p}"),
            ]
        };
        let a = dir.path().join("a.csv");
        let b = dir.path().join("b.csv");
        let mut sink = Vec::new();
        let args_a = args(a.to_str().unwrap());
        assert_eq!(run(std::iter::once("goe-disc".to_string()).chain(args_a), &mut sink, &mut Vec::new()), 0);
        let mut args_b = args(b.to_str().unwrap());
        args_b.push("--workers=3".into());
        assert_eq!(run(std::iter::once("goe-disc".to_string()).chain(args_b), &mut sink, &mut Vec::new()), 0);
        let (ca, cb) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
        assert_eq!(ca, cb);
        let header = String::from_utf8(ca).unwrap();
        assert!(header.starts_with("n,m,trial,seed,disc,predicted,xi_hat,ratio,runtime_ms\n"));
    }

    #[test]
    fn json_output_is_array() {
        let (code, out, _) = call(&["predict", "--m", "2", "--n", "12,16", "--format", "json"]);
        assert_eq!(code, 0);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v.as_array().unwrap().len(), 2);
    }

    #[test]
    fn verify_suite_exit_codes() {
        let (code, out, _) = call(&["verify", "--suite", "eigensolver"]);
        assert_eq!(code, 0);
        assert!(out.starts_with("suite,check,measured,target,tolerance,passed\n"));
    }
}
