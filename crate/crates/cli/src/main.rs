//! `fsig`: splitting numbers, F-signature bounds and the reference-table
//! regression suite from the command line.

mod commands;
mod job;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use fsig_core::frobenius::{FrobeniusError, DEFAULT_BUDGET};
use fsig_core::wpoly::PolyError;

use job::JobArgs;

pub const EXIT_CHECK: u8 = 1;
pub const EXIT_INPUT: u8 = 2;
pub const EXIT_HOMOGENEITY: u8 = 3;
pub const EXIT_ORACLE: u8 = 4;
pub const EXIT_BUDGET: u8 = 5;

/// An error message with the exit code it maps to.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn new(code: u8, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
        }
    }

    pub fn input(message: impl Into<String>) -> Self {
        Self::new(EXIT_INPUT, message)
    }

    pub fn from_poly(e: PolyError) -> Self {
        let code = match e {
            PolyError::NotHomogeneous(_) => EXIT_HOMOGENEITY,
            _ => EXIT_INPUT,
        };
        Self::new(code, e.to_string())
    }

    pub fn from_frobenius(e: FrobeniusError) -> Self {
        let code = match e {
            FrobeniusError::NotHomogeneous(_) => EXIT_HOMOGENEITY,
            FrobeniusError::BudgetExceeded { .. } => EXIT_BUDGET,
            _ => EXIT_INPUT,
        };
        Self::new(code, e.to_string())
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "fsig",
    version,
    about = "Frobenius splitting numbers of weighted hypersurfaces"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, clap::Args)]
struct OutputArgs {
    /// Machine-readable JSON output.
    #[arg(long)]
    json: bool,
    /// Append 6-significant-digit decimals to rationals.
    #[arg(long)]
    approx: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Poincare series, a-invariant, e' and the upper bound for s(R).
    Bound {
        #[command(flatten)]
        job: JobArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Splitting number a_q for a single q = p^e.
    Aq {
        #[command(flatten)]
        job: JobArgs,
        #[command(flatten)]
        out: OutputArgs,
        #[arg(short = 'e', long, default_value_t = 1)]
        e: u32,
        #[arg(long)]
        budget: Option<u64>,
        /// Cross-check against the unblocked reference computation.
        #[arg(long)]
        oracle: bool,
    },
    /// Splitting numbers for e = 1..=e_max.
    Fsignature {
        #[command(flatten)]
        job: JobArgs,
        #[command(flatten)]
        out: OutputArgs,
        #[arg(long)]
        e_max: Option<u32>,
        #[arg(long)]
        budget: Option<u64>,
        #[arg(long)]
        oracle: bool,
    },
    /// Unique-free-summand classification.
    Classify {
        #[command(flatten)]
        job: JobArgs,
        #[command(flatten)]
        out: OutputArgs,
        #[arg(long)]
        e_max: Option<u32>,
        #[arg(long)]
        budget: Option<u64>,
    },
    /// Fedder's F-purity test.
    Fedder {
        #[command(flatten)]
        job: JobArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Run the built-in regression suite and write results.csv/results.json.
    VerifyPaper {
        #[arg(long, default_value = "fsig-results")]
        out_dir: PathBuf,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
        /// Reference table overriding the built-in one (see `fsig golden`).
        #[arg(long)]
        golden: Option<PathBuf>,
        /// Keep wall-clock times and timestamps in the output files.
        #[arg(long)]
        timings: bool,
    },
    /// Print the built-in reference table as JSON.
    Golden,
    /// Generate a seeded random corpus; `--check` tests F-purity against
    /// the sign of the a-invariant.
    Corpus {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        count: usize,
        #[arg(long, default_value_t = 3)]
        max_vars: usize,
        #[arg(long, default_value_t = 4)]
        max_weight: u32,
        #[arg(long, value_delimiter = ',', default_value = "3,5,7")]
        primes: Vec<u32>,
        #[arg(long)]
        check: bool,
    },
}

fn configure_threads() -> Result<(), Failure> {
    if let Ok(value) = std::env::var("FSIG_THREADS") {
        let n: usize = value.parse().ok().filter(|&n| n > 0).ok_or_else(|| {
            Failure::input(format!(
                "FSIG_THREADS must be a positive integer, got `{value}`"
            ))
        })?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::input(e.to_string()))?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    configure_threads()?;
    match cli.command {
        Command::Bound { job, out } => commands::bound(&job.resolve()?, &out.into()),
        Command::Aq {
            job,
            out,
            e,
            budget,
            oracle,
        } => {
            let spec = job.resolve()?;
            let budget = budget.or(spec.budget).unwrap_or(DEFAULT_BUDGET);
            commands::aq(&spec, e, budget, oracle, &out.into())
        }
        Command::Fsignature {
            job,
            out,
            e_max,
            budget,
            oracle,
        } => {
            let spec = job.resolve()?;
            let e_max = e_max.or(spec.e_max).unwrap_or(2);
            let budget = budget.or(spec.budget).unwrap_or(DEFAULT_BUDGET);
            commands::fsignature(&spec, e_max, budget, oracle, &out.into())
        }
        Command::Classify {
            job,
            out,
            e_max,
            budget,
        } => {
            let spec = job.resolve()?;
            let e_max = e_max.or(spec.e_max).unwrap_or(2);
            let budget = budget.or(spec.budget).unwrap_or(DEFAULT_BUDGET);
            commands::classify(&spec, e_max, budget, &out.into())
        }
        Command::Fedder { job, out } => commands::fedder(&job.resolve()?, &out.into()),
        Command::VerifyPaper {
            out_dir,
            budget,
            golden,
            timings,
        } => commands::verify_paper(&out_dir, budget, golden.as_deref(), timings),
        Command::Golden => commands::golden(),
        Command::Corpus {
            seed,
            count,
            max_vars,
            max_weight,
            primes,
            check,
        } => commands::corpus(seed, count, max_vars, max_weight, &primes, check),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("fsig: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}
