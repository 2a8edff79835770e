//! `hypcompact`: experiments on the compactified actions of `SO₀(n,1)`.
//!
//! Exit codes: 0 pass, 1 violation or runtime failure, 2 usage error.
//! Tolerances are overridden with `--tol.<name> <value>`; see
//! `hypcompact_core::tolerances::DEFAULTS` for the names.

mod commands;
mod config;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use hypcompact_core::diagnostics::ActionModel;
use hypcompact_core::GeneratorKind;

use config::{Format, RunConfig};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Failure(String),
}

impl CliError {
    pub fn failure<E: std::fmt::Display>(e: E) -> Self {
        CliError::Failure(e.to_string())
    }
}

#[derive(Parser, Debug)]
#[command(name = "hypcompact", version, about = "Compactified SO0(n,1) actions on the hyperbolic ball")]
struct Cli {
    /// Dimension of the hyperbolic space (at least 2).
    #[arg(long, global = true, default_value_t = 3)]
    n: usize,
    /// Seed for every sampled input.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Boundary reparametrization: p=<int>, f1 or f2.
    #[arg(long, global = true, default_value = "p=2")]
    f: String,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Report format; `symbolic` defaults to text, everything else to json.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Identity, composition and boundary invariance for proj, conf and the
    /// reparametrized action, plus the boundary behaviour of pulled-back fields.
    CheckAction {
        #[arg(long, default_value_t = 200)]
        samples: usize,
    },
    /// Classifies f/f' near 0 and finds the first non-vanishing derivative of f.
    Smoothness {
        #[arg(long, default_value_t = 5)]
        k_max: usize,
    },
    /// Hölder exponent of the boundary conjugacy between two ball actions.
    Holder {
        #[arg(long, default_value = "proj")]
        from: ActionModel,
        #[arg(long, default_value = "conf")]
        to: ActionModel,
        #[arg(long, default_value_t = 400)]
        pairs: usize,
    },
    /// Endpoint limits and boundary transversality of geodesics.
    Geodesic {
        /// Number of random geodesics when --a/--b are absent.
        #[arg(long, default_value_t = 10)]
        random: usize,
        /// First Klein endpoint, comma separated.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        a: Option<Vec<f64>>,
        /// Second Klein endpoint, comma separated.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        b: Option<Vec<f64>>,
    },
    /// Pulled-back generator field: closed form against numeric differentiation.
    Pullback {
        /// H, X<i>, Y<i> or R<j><k>.
        #[arg(long, default_value = "H")]
        generator: GeneratorKind,
        /// A chart point u1,…,y; random points otherwise.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        point: Option<Vec<f64>>,
        #[arg(long, default_value_t = 10)]
        samples: usize,
    },
    /// Exact pullback of a polynomial field by y -> y^p and its analyticity.
    Symbolic {
        /// Field text, e.g. "y d/dy + x1 d/dx1".
        #[arg(long, allow_hyphen_values = true)]
        field: Option<String>,
        /// Read the field text from a file.
        #[arg(long)]
        file: Option<PathBuf>,
        #[arg(long, default_value_t = 2)]
        p: i64,
    },
}

fn run(args: Vec<String>) -> Result<bool, CliError> {
    let (args, tol) = config::split_tolerances(args)?;
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let usage = e.use_stderr();
            let _ = e.print();
            return if usage {
                Err(CliError::Usage(String::new()))
            } else {
                Ok(true)
            };
        }
    };
    let default_format = match cli.command {
        Command::Symbolic { .. } => Format::Text,
        _ => Format::Json,
    };
    let cfg = RunConfig::new(
        cli.n,
        cli.seed,
        &cli.f,
        tol,
        cli.out,
        cli.format.unwrap_or(default_format),
    )?;
    let report = match cli.command {
        Command::CheckAction { samples } => commands::check_action(&cfg, samples)?,
        Command::Smoothness { k_max } => commands::smoothness(&cfg, k_max)?,
        Command::Holder { from, to, pairs } => commands::holder(&cfg, from, to, pairs)?,
        Command::Geodesic { random, a, b } => commands::geodesic(&cfg, random, a, b)?,
        Command::Pullback {
            generator,
            point,
            samples,
        } => commands::pullback(&cfg, generator, point, samples)?,
        Command::Symbolic { field, file, p } => commands::symbolic(&cfg, field, file, p)?,
    };
    report.emit(&cfg, cfg.format)?;
    Ok(report.pass)
}

fn main() -> ExitCode {
    match run(std::env::args().collect()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(CliError::Usage(msg)) => {
            if !msg.is_empty() {
                eprintln!("usage error: {msg}");
            }
            ExitCode::from(2)
        }
        Err(CliError::Failure(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
