//! `lagdelta` command-line front end.
//!
//! Exit codes: 0 success, 1 verification failure, 2 input error. Errors are
//! written to stderr as a single JSON object.

mod commands;
mod io;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::io::{report_error, Outcome};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(name = "lagdelta", version, about = "Delta-invariants and optimal inequalities for Lagrangian cubic forms")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, global = true, default_value = "json")]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

/// Optimizer settings; flags override values from `--options`.
#[derive(Debug, Args)]
pub struct OptimizerArgs {
    /// JSON file with any of restarts, max_iters, tol, seed.
    #[arg(long)]
    pub options: Option<PathBuf>,
    #[arg(long)]
    pub restarts: Option<usize>,
    #[arg(long)]
    pub max_iters: Option<usize>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long, env = "LAGDELTA_SEED")]
    pub seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compute the delta-invariant of a cubic form.
    Delta {
        #[arg(long)]
        tensor: PathBuf,
        /// Block sizes, e.g. "2,2".
        #[arg(long)]
        partition: String,
        /// Ambient constant c (holomorphic sectional curvature 4c).
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        c: f64,
        /// Only enumerate coordinate-spanned tuples.
        #[arg(long)]
        oracle_only: bool,
        #[command(flatten)]
        opt: OptimizerArgs,
    },
    /// Compare delta with the optimal and legacy bounds.
    Verify {
        #[arg(long)]
        tensor: PathBuf,
        #[arg(long)]
        partition: String,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        c: f64,
        #[command(flatten)]
        opt: OptimizerArgs,
    },
    /// Dump the quadratic-form matrices for a block and coefficient.
    Matrix {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        partition: String,
        /// 1-based block index.
        #[arg(long, default_value_t = 1)]
        ell: usize,
        /// Coefficient C as "p/q", a decimal, or "critical".
        #[arg(long, default_value = "critical", allow_hyphen_values = true)]
        coef: String,
    },
    /// Build a tensor attaining equality.
    ConstructEquality {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
        theorem: u8,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        partition: String,
        /// JSON parameters; a seeded random witness is built when omitted.
        #[arg(long)]
        params: Option<PathBuf>,
        #[arg(long, env = "LAGDELTA_SEED", default_value_t = 0)]
        seed: u64,
        /// Entry range for random witnesses.
        #[arg(long, default_value_t = 1.0)]
        scale: f64,
    },
    /// Realize a cubic form as a gradient-graph immersion and recover it.
    ImmersionCheck {
        #[arg(long)]
        tensor: PathBuf,
        /// JSON array with the point x (default: origin).
        #[arg(long)]
        at: Option<PathBuf>,
        #[arg(long)]
        fd_crosscheck: bool,
    },
    /// Run a randomized verification campaign.
    Sample {
        /// JSON campaign configuration; flags override its fields.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long, env = "LAGDELTA_SEED")]
        seed: Option<u64>,
        #[arg(long)]
        n_min: Option<usize>,
        #[arg(long)]
        n_max: Option<usize>,
        /// Block list to sample from (repeatable); all admissible when omitted.
        #[arg(long = "partition")]
        partitions: Vec<String>,
        /// Comma-separated ambient constants.
        #[arg(long, allow_hyphen_values = true)]
        c_values: Option<String>,
        #[arg(long)]
        scale: Option<f64>,
        /// Also write the summary JSON here.
        #[arg(long)]
        summary: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> anyhow::Result<Outcome> {
    let fmt = cli.format;
    match cli.command {
        Command::Delta {
            tensor,
            partition,
            c,
            oracle_only,
            opt,
        } => commands::delta(fmt, &tensor, &partition, c, oracle_only, &opt),
        Command::Verify {
            tensor,
            partition,
            c,
            opt,
        } => commands::verify(fmt, &tensor, &partition, c, &opt),
        Command::Matrix {
            n,
            partition,
            ell,
            coef,
        } => commands::matrix(fmt, n, &partition, ell, &coef),
        Command::ConstructEquality {
            theorem,
            n,
            partition,
            params,
            seed,
            scale,
        } => commands::construct_equality(fmt, theorem, n, &partition, params.as_deref(), seed, scale),
        Command::ImmersionCheck {
            tensor,
            at,
            fd_crosscheck,
        } => commands::immersion_check(fmt, &tensor, at.as_deref(), fd_crosscheck),
        Command::Sample {
            config,
            samples,
            seed,
            n_min,
            n_max,
            partitions,
            c_values,
            scale,
            summary,
        } => commands::sample(
            fmt,
            commands::SampleOverrides {
                config,
                samples,
                seed,
                n_min,
                n_max,
                partitions,
                c_values,
                scale,
            },
            summary.as_deref(),
        ),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            io::emit_error("Usage", &e.render().to_string());
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(Outcome::Success) => ExitCode::SUCCESS,
        Ok(Outcome::VerificationFailed) => ExitCode::from(1),
        Err(e) if io::is_broken_pipe(&e) => ExitCode::SUCCESS,
        Err(e) => {
            report_error(&e);
            ExitCode::from(2)
        }
    }
}
