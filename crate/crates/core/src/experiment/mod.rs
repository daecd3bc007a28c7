//! Config-driven harness behind the `qbc` binary: builds instances, runs
//! the attack, sweeps the security parameter and checks every bound.

mod commands;
mod config;
mod report;
mod verify;

use std::path::PathBuf;

use serde::Serialize;

pub use commands::{cmd_attack, cmd_bob_sub, cmd_conceal, cmd_sweep, evaluate_attack};
pub use config::{
    BobSubPlan, BobSubSpec, ComplexEntry, ExperimentConfig, Format, OutputSpec, ProtocolSpec,
    SweepRange,
};
pub use report::{fmt_g, render, write_atomic, BobSubRow, ConcealRow, CsvRow, ReportRow, REPORT_HEADER};
pub use verify::{cmd_verify, default_matrix};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("invariant failure: {0}")]
    Invariant(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Invariant(_) => 1,
            CliError::Config(_) | CliError::Io(_) => 2,
        }
    }
}

/// One named invariant evaluation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub id: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn new(id: &'static str, passed: bool, detail: impl Into<String>) -> Self {
        Check {
            id,
            passed,
            detail: detail.into(),
        }
    }
}

/// Seed, format and destination after command-line overrides.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOptions {
    pub seed: u64,
    pub format: Format,
    pub out: Option<PathBuf>,
}

impl RunOptions {
    pub fn resolve(
        cfg: Option<&ExperimentConfig>,
        seed: Option<u64>,
        format: Option<Format>,
        out: Option<PathBuf>,
    ) -> Self {
        let output = cfg.and_then(|c| c.output.clone());
        RunOptions {
            seed: seed.or(cfg.map(|c| c.seed)).unwrap_or(0),
            format: format
                .or(output.as_ref().and_then(|o| o.format))
                .unwrap_or_default(),
            out: out.or(output.and_then(|o| o.path)),
        }
    }
}

/// Rendered output plus the checks behind it.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub text: String,
    pub checks: Vec<Check>,
    pub summary: Vec<String>,
}

impl Outcome {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}
