use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use qbc_core::experiment::{
    cmd_attack, cmd_bob_sub, cmd_conceal, cmd_sweep, cmd_verify, write_atomic, CliError,
    ExperimentConfig, Format, Outcome, RunOptions,
};

#[derive(Parser)]
#[command(name = "qbc", version, about = "Purification attacks on quantum bit commitment")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Concealment deficits over random and extreme distributions.
    Conceal(Args),
    /// Synthesize U'_A and report its success against every bound.
    Attack(Args),
    /// One attack row per security parameter in the sweep range.
    Sweep(Args),
    /// Bob's distribution substitution and what Alice can see of it.
    BobSub(Args),
    /// Run every invariant suite; without a config, a built-in size matrix.
    Verify(Args),
}

#[derive(clap::Args)]
struct Args {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        }
    }
}

fn run(cli: Cli) -> Result<Outcome, CliError> {
    let (args, verify) = match &cli.command {
        Command::Verify(a) => (a, true),
        Command::Conceal(a) | Command::Attack(a) | Command::Sweep(a) | Command::BobSub(a) => {
            (a, false)
        }
    };
    let cfg = match &args.config {
        Some(path) => Some(ExperimentConfig::load(path)?),
        None if verify => None,
        None => return Err(CliError::Config("--config <path> is required".into())),
    };
    let opts = RunOptions::resolve(
        cfg.as_ref(),
        args.seed,
        args.format.map(Format::from),
        args.out.clone(),
    );
    eprintln!("seed {}", opts.seed);
    let outcome = match (&cli.command, cfg.as_ref()) {
        (Command::Verify(_), cfg) => cmd_verify(cfg, opts.seed)?,
        (Command::Conceal(_), Some(cfg)) => cmd_conceal(cfg, opts.seed, opts.format)?,
        (Command::Attack(_), Some(cfg)) => cmd_attack(cfg, opts.seed, opts.format)?,
        (Command::Sweep(_), Some(cfg)) => cmd_sweep(cfg, opts.seed, opts.format)?,
        (Command::BobSub(_), Some(cfg)) => cmd_bob_sub(cfg, opts.seed, opts.format)?,
        (_, None) => unreachable!("config presence checked above"),
    };
    match &opts.out {
        Some(path) => write_atomic(path, &outcome.text)?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(outcome.text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| CliError::Io(format!("stdout: {e}")))?;
        }
    }
    Ok(outcome)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(outcome) => {
            for line in &outcome.summary {
                eprintln!("{line}");
            }
            for c in outcome.failures() {
                eprintln!("FAILED {}: {}", c.id, c.detail);
            }
            if outcome.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("qbc: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
