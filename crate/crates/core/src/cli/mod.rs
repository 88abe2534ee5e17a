//! The `mbl` command line: `price | hedge | simulate | verify`.
//!
//! Exit codes: 0 on success, 1 when a verification check fails, 2 on any
//! input error. `MBL_THREADS` caps the worker pool.

mod commands;
mod config;
mod report;
mod verify;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub use commands::{cmd_hedge, cmd_price, cmd_simulate, rows_report};
pub use config::{ClaimSpec, Format, OutputSpec, RunConfig};
pub use report::Report;
pub use verify::{default_suite, subordinated_suite, Check, VerifyOptions, VerifyOutcome};

use crate::batch::{parse_batch, price_batch};
use crate::error::{Error, Result};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "mbl", version, about = "Exchange options with ratio barriers")]
pub struct Cli {
    /// JSON run configuration; the reference up-and-in claim when omitted.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output file; stdout when omitted.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Price the configured claim (or a JSON array of requests).
    Price,
    /// Print the semi-static hedge portfolio.
    Hedge {
        /// Rewrite the hedge as vanillas on the price ratio.
        #[arg(long)]
        foreign: bool,
        /// Replace power-call legs by a strip of calls and puts.
        #[arg(long)]
        replicate: bool,
        #[arg(long, default_value_t = 400)]
        strikes: usize,
    },
    /// Monte Carlo estimate of the configured claim.
    Simulate,
    /// Run the verification suite.
    Verify {
        #[arg(long)]
        subordinated: bool,
        /// Gamma clock variance rate for the subordinated suite.
        #[arg(long)]
        kappa: Option<f64>,
        /// Negative control: flip the sign of beta in the hedge.
        #[arg(long)]
        negate_beta: bool,
    },
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code.
pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_INPUT
        }
    }
}

fn configure_threads() -> Result<()> {
    let Ok(v) = std::env::var("MBL_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| Error::InvalidConfig(format!("MBL_THREADS must be a positive integer, got '{v}'")))?;
    // A pool may already exist when called twice in one process.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

enum Input {
    Single(Box<RunConfig>),
    Batch(Vec<crate::batch::PriceRequest>),
}

fn load(cli: &Cli) -> Result<Input> {
    let Some(path) = &cli.config else {
        return Ok(Input::Single(Box::new(RunConfig::reference())));
    };
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidConfig(format!("cannot read {}: {e}", path.display())))?;
    if text.trim_start().starts_with('[') {
        Ok(Input::Batch(parse_batch(&text)?))
    } else {
        Ok(Input::Single(Box::new(RunConfig::from_json(&text)?)))
    }
}

fn apply_overrides(cli: &Cli, cfg: &mut RunConfig) {
    if let Some(seed) = cli.seed {
        let mut sim = cfg.sim_or_default();
        sim.seed = seed;
        cfg.sim = Some(sim);
    }
}

/// Runs a parsed command line.
pub fn run(cli: &Cli) -> Result<i32> {
    configure_threads()?;
    let input = load(cli)?;
    let (report, code, out) = match input {
        Input::Batch(mut reqs) => {
            if !matches!(cli.command, Command::Price) {
                return Err(Error::InvalidConfig("request arrays are only accepted by `price`".into()));
            }
            if let Some(seed) = cli.seed {
                for r in &mut reqs {
                    if let Some(s) = &mut r.sim {
                        s.seed = seed;
                    }
                }
            }
            (rows_report(&price_batch(&reqs)?), EXIT_OK, OutputSpec::default())
        }
        Input::Single(mut cfg) => {
            apply_overrides(cli, &mut cfg);
            let out = cfg.output.clone();
            let (report, code) = match &cli.command {
                Command::Price => (cmd_price(&cfg)?, EXIT_OK),
                Command::Hedge {
                    foreign,
                    replicate,
                    strikes,
                } => (cmd_hedge(&cfg, *foreign, *replicate, *strikes)?, EXIT_OK),
                Command::Simulate => (cmd_simulate(&cfg)?, EXIT_OK),
                Command::Verify {
                    subordinated,
                    kappa,
                    negate_beta,
                } => {
                    let opts = VerifyOptions {
                        subordinated: *subordinated,
                        kappa: *kappa,
                        negate_beta: *negate_beta,
                    };
                    let outcome = if opts.subordinated {
                        subordinated_suite(&cfg, &opts)?
                    } else {
                        default_suite(&cfg, &opts)?
                    };
                    let code = if outcome.passed { EXIT_OK } else { EXIT_VERIFY_FAILED };
                    (outcome.report(), code)
                }
            };
            (report, code, out)
        }
    };
    let default_format = if matches!(cli.command, Command::Verify { .. }) { Format::Json } else { Format::Table };
    let format = cli.format.or(out.format).unwrap_or(default_format);
    match cli.output.as_ref().or(out.path.as_ref()) {
        Some(path) => {
            let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
            report.render(format, &mut f)?;
            f.flush()?;
        }
        None => {
            let stdout = std::io::stdout();
            report.render(format, stdout.lock())?;
        }
    }
    Ok(code)
}
