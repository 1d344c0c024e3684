//! `secrecy`: command-line front end for the key-rate / distortion region.
//!
//! Exit codes: 0 success or inside the region, 1 negative verdict,
//! 2 usage or validation error, 3 numerical failure.

mod commands;
mod instance;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use secrecy_core::Error;

/// Failure classes, each with its own exit code.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Numerical(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Degenerate(_) | Error::SolverFailure(_) => CliError::Numerical(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "{m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
        }
    }
}

/// Outcome of a command that ran to completion.
pub enum Verdict {
    Success,
    Negative,
}

#[derive(Parser)]
#[command(
    name = "secrecy",
    version,
    about = "Secret-key rate versus eavesdropper distortion for lossless source transmission",
    after_help = "Set SECRECY_THREADS to cap worker threads (default: available cores).\n\
                  Exit codes: 0 success/inside, 1 negative verdict, 2 usage or validation error, 3 numerical failure."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List the corner points: distributions whose set of distortion-minimizing
    /// reconstructions is at least as large as their support.
    ///
    /// The tie set of p is the argmin of z -> E_p d(X,z): the reconstructions that
    /// equally minimize expected distortion, as the eavesdropper would choose them.
    /// A definition written with argmax is read as a typo for argmin.
    Corners {
        instance: PathBuf,
        /// Write JSON here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact breakpoints of the maximum forced distortion D*(R0).
    ///
    /// Without --csv or --json the CSV is printed to stdout.
    Curve {
        instance: PathBuf,
        /// Also emit rows at R0 = 0, STEP, 2 STEP, ... up to H(X).
        #[arg(long, value_name = "STEP")]
        grid: Option<f64>,
        /// Write CSV (R0,D,kind) here.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Write JSON with decompositions here.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Membership of (R0, R, D) in the achievable region. Exit 0 inside, 1 outside.
    Check {
        instance: PathBuf,
        #[arg(long, allow_negative_numbers = true)]
        r0: f64,
        #[arg(long, allow_negative_numbers = true)]
        r: f64,
        #[arg(long, allow_negative_numbers = true)]
        d: f64,
    },
    /// Search auxiliary channels for a certified lower bound on D*(R0).
    Oracle {
        instance: PathBuf,
        #[arg(long)]
        r0: f64,
        /// Auxiliary alphabet size (default: number of corner points).
        #[arg(long = "usize", value_name = "K")]
        u_size: Option<usize>,
        #[arg(long, default_value_t = 500)]
        restarts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write JSON here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Monte-Carlo run of the cover-and-bin scheme.
    Simulate {
        instance: PathBuf,
        /// Channel file `{"cond": [[p(u|x) for x] for u]}`.
        #[arg(long, conflicts_with = "auto", required_unless_present = "auto")]
        channel: Option<PathBuf>,
        /// Derive the channel from the optimal decomposition at --r0.
        #[arg(long, requires = "r0")]
        auto: bool,
        #[arg(long)]
        r0: Option<f64>,
        /// Block length.
        #[arg(long)]
        n: usize,
        /// Rate slack in bits per symbol.
        #[arg(long, default_value_t = secrecy_core::scheme::DEFAULT_EPS)]
        eps: f64,
        /// Typicality slack.
        #[arg(long, default_value_t = secrecy_core::scheme::DEFAULT_DELTA)]
        delta: f64,
        #[arg(long, value_enum, default_value_t = Rule::CollisionFree)]
        rule: Rule,
        #[arg(long)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also run the exact causal eavesdropper (n <= 12).
        #[arg(long)]
        exact_causal: bool,
        /// Write JSON here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Rule {
    CollisionFree,
    LowestTypical,
}

impl From<Rule> for secrecy_core::CoverRule {
    fn from(r: Rule) -> Self {
        match r {
            Rule::CollisionFree => secrecy_core::CoverRule::CollisionFree,
            Rule::LowestTypical => secrecy_core::CoverRule::LowestTypical,
        }
    }
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("SECRECY_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| CliError::Usage(format!("SECRECY_THREADS must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Usage(format!("cannot configure thread pool: {e}")))
}

fn run(cli: Cli) -> Result<Verdict, CliError> {
    configure_threads()?;
    match cli.command {
        Command::Corners { instance, out } => commands::corners(&instance, out.as_deref()),
        Command::Curve { instance, grid, csv, json } => commands::curve(&instance, grid, csv.as_deref(), json.as_deref()),
        Command::Check { instance, r0, r, d } => commands::check(&instance, r0, r, d),
        Command::Oracle {
            instance,
            r0,
            u_size,
            restarts,
            seed,
            out,
        } => commands::oracle(&instance, r0, u_size, restarts, seed, out.as_deref()),
        Command::Simulate {
            instance,
            channel,
            auto: _,
            r0,
            n,
            eps,
            delta,
            rule,
            trials,
            seed,
            exact_causal,
            out,
        } => commands::simulate(
            &instance,
            commands::SimulateArgs {
                channel,
                r0,
                n,
                eps,
                delta,
                rule: rule.into(),
                trials,
                seed,
                exact_causal,
            },
            out.as_deref(),
        ),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(Verdict::Success) => ExitCode::SUCCESS,
        Ok(Verdict::Negative) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
