//! Experiment orchestration, output and verification suites for the
//! `goe-disc` command-line tool.

pub mod cli;
pub mod config;
pub mod error;
pub mod experiments;
pub mod output;
pub mod verify;

pub use cli::run;
pub use config::{Cli, Command, ExperimentConfig, Mode, Suite};
pub use error::{HarnessError, Result};
