//! Command-line front end of the `nbesov` toolkit: config ingestion,
//! fixture generation, equivalence sweeps and report emission.

pub mod commands;
pub mod config;
pub mod error;
pub mod report;

use std::ffi::OsString;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::commands::{ExampleArgs, Overrides};
use crate::config::{Format, RunConfig};
use crate::error::{CliError, CliResult};
use crate::report::Report;

#[derive(Debug, Parser)]
#[command(name = "nbesov", version, about = "Nikol'skii-Besov class functionals and inequality sweeps")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// TOML config (or JSON when the name ends in `.json`).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads, 0 for one per core.
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,
    /// Truncation point ν_max of modulus sums.
    #[arg(long, global = true)]
    pub max_nu: Option<u64>,
    /// Suppress the summary on stderr.
    #[arg(long, global = true)]
    pub quiet: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Moduli of smoothness over a t-grid.
    Modulus,
    /// Best approximations E_n over the n-grid.
    BestApprox,
    /// The class functional in integral, series, coefficient and dyadic form.
    Equivalence,
    /// The lacunary example sitting strictly between the H and B classes.
    Example(ExampleFlags),
    /// Brute-force sweep of the sequence inequalities.
    IneqSweep,
    /// Quasi-monotonicity and doubling constants of majorants.
    PhiCheck,
}

#[derive(Debug, Clone, Copy, Args)]
pub struct ExampleFlags {
    #[arg(long, default_value_t = 1.0)]
    pub r: f64,
    #[arg(long, default_value_t = 0.5)]
    pub alpha: f64,
    #[arg(long, default_value_t = 1.0)]
    pub theta: f64,
    #[arg(long, default_value_t = 0.25)]
    pub lambda: f64,
    #[arg(long, default_value_t = 60)]
    pub max_n: u32,
}

fn require_config(cli: &Cli) -> CliResult<RunConfig> {
    match &cli.config {
        Some(path) => RunConfig::load(path),
        None => Err(CliError::Config("this command needs --config".into())),
    }
}

fn optional_config(cli: &Cli) -> CliResult<RunConfig> {
    match &cli.config {
        Some(path) => RunConfig::load(path),
        None => Ok(RunConfig::default()),
    }
}

fn execute(cli: &Cli) -> CliResult<(Report, RunConfig)> {
    let ov = Overrides {
        seed: cli.seed,
        max_nu: cli.max_nu,
    };
    let (report, cfg) = match &cli.command {
        Command::Modulus => {
            let cfg = require_config(cli)?;
            (commands::cmd_modulus(&cfg)?, cfg)
        }
        Command::BestApprox => {
            let cfg = require_config(cli)?;
            (commands::cmd_best_approx(&cfg)?, cfg)
        }
        Command::Equivalence => {
            let cfg = require_config(cli)?;
            (commands::cmd_equivalence(&cfg, ov)?, cfg)
        }
        Command::Example(f) => {
            let cfg = optional_config(cli)?;
            let args = ExampleArgs {
                r: f.r,
                alpha: f.alpha,
                theta: f.theta,
                lambda: f.lambda,
                max_n: f.max_n,
            };
            (commands::cmd_example(args, cfg.tolerances.slope_tol)?, cfg)
        }
        Command::IneqSweep => {
            let cfg = optional_config(cli)?;
            (commands::cmd_ineq_sweep(&cfg, ov)?, cfg)
        }
        Command::PhiCheck => {
            let cfg = optional_config(cli)?;
            (commands::cmd_phi_check(&cfg)?, cfg)
        }
    };
    report.check_finite()?;
    Ok((report, cfg))
}

fn emit(cli: &Cli, report: &Report, cfg: &RunConfig) -> CliResult<()> {
    let format = cli.format.or(cfg.output.format).unwrap_or_default();
    match cli.out.as_ref().or(cfg.output.path.as_ref()) {
        Some(path) => {
            let mut w = BufWriter::new(std::fs::File::create(path)?);
            report.write(format, &mut w)?;
            w.flush()?;
        }
        None => {
            let stdout = std::io::stdout();
            let mut w = stdout.lock();
            report.write(format, &mut w)?;
        }
    }
    if !cli.quiet {
        for line in &report.summary {
            eprintln!("{line}");
        }
    }
    Ok(())
}

/// Run parsed arguments and return the process exit code.
pub fn run_cli(cli: &Cli) -> i32 {
    let outcome = if cli.threads > 0 {
        match rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build() {
            Ok(pool) => pool.install(|| execute(cli)),
            Err(e) => Err(CliError::Config(format!("thread pool: {e}"))),
        }
    } else {
        execute(cli)
    };
    match outcome.and_then(|(report, cfg)| emit(cli, &report, &cfg)) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

/// Parse `args` (program name first) and run.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run_cli(&cli),
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            code
        }
    }
}
