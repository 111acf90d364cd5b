//! Batch front end: exact values, fast-vs-brute comparisons, asymptotic
//! validation tables, constants and a naive-vs-blocked timing harness, all
//! emitted as CSV.
//!
//! Exit codes: 0 success, 1 usage error, 2 computation error (overflow or
//! enumeration guard), 3 comparison mismatch.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(
    name = "gcdsum",
    version,
    about = "Exact gcd-sum, coprime-tuple and divisor summatory computations with asymptotic validation"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Compute exact values over a grid of x
    Compute(ComputeArgs),
    /// Run the fast and brute-force methods and compare them pointwise
    Compare(CompareArgs),
    /// Tabulate exact values against the predicted main term
    Asympt(AsymptArgs),
    /// Print the constants entering the main terms, with tail estimates
    Constants(ConstantsArgs),
    /// Time the naive O(x) loop against quotient-block evaluation
    Bench(BenchArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    /// Gcd-weighted tuple sum A_k
    #[value(alias = "A")]
    A,
    /// Coprime-tuple count B_k
    #[value(alias = "B")]
    B,
    /// Pairwise-coprime tuple count S_k
    #[value(alias = "S")]
    S,
    /// Divisor summatory T_k
    #[value(alias = "T")]
    T,
}

impl KindArg {
    fn name(self) -> &'static str {
        match self {
            KindArg::A => "A",
            KindArg::B => "B",
            KindArg::S => "S",
            KindArg::T => "T",
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum WeightArg {
    Tau,
    One,
    Id,
}

impl WeightArg {
    fn name(self) -> &'static str {
        match self {
            WeightArg::Tau => "tau",
            WeightArg::One => "one",
            WeightArg::Id => "id",
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Fast,
    Brute,
    Both,
}

#[derive(Args)]
pub struct GridArgs {
    /// Evaluation point; may be repeated for an explicit grid
    #[arg(long = "x", value_name = "INT")]
    x: Vec<u64>,

    /// Smallest point of a log-spaced grid
    #[arg(long, value_name = "INT")]
    x_min: Option<u64>,

    /// Largest point of a log-spaced grid
    #[arg(long, value_name = "INT")]
    x_max: Option<u64>,

    /// Points per decade of a log-spaced grid (rounded to integers,
    /// deduplicated; endpoints always included)
    #[arg(long, value_name = "INT", default_value_t = 1)]
    per_decade: u32,
}

impl GridArgs {
    fn resolve(&self) -> Result<Vec<u64>, CliError> {
        let explicit = !self.x.is_empty();
        let spec = self.x_min.is_some() || self.x_max.is_some();
        if explicit && spec {
            return Err(CliError::Usage(
                "give either --x points or an --x-min/--x-max range, not both".into(),
            ));
        }
        if explicit {
            let mut xs = self.x.clone();
            if xs.contains(&0) {
                return Err(CliError::Usage("grid points must be >= 1".into()));
            }
            xs.sort_unstable();
            xs.dedup();
            return Ok(xs);
        }
        let (lo, hi) = match (self.x_min, self.x_max) {
            (Some(lo), Some(hi)) => (lo, hi),
            _ => {
                return Err(CliError::Usage(
                    "specify --x or both --x-min and --x-max".into(),
                ))
            }
        };
        if lo == 0 || hi < lo {
            return Err(CliError::Usage(format!(
                "need 1 <= x-min <= x-max, got {lo}..{hi}"
            )));
        }
        if self.per_decade == 0 {
            return Err(CliError::Usage("--per-decade must be >= 1".into()));
        }
        let mut xs = vec![lo, hi];
        let l0 = (lo as f64).log10();
        let l1 = (hi as f64).log10();
        let mut i = 1u64;
        loop {
            let l = l0 + i as f64 / self.per_decade as f64;
            if l >= l1 - 1e-12 {
                break;
            }
            xs.push(10f64.powf(l).round().max(1.0) as u64);
            i += 1;
        }
        xs.sort_unstable();
        xs.dedup();
        Ok(xs)
    }
}

#[derive(Args)]
pub struct ComputeArgs {
    #[arg(long, value_enum)]
    kind: KindArg,
    #[arg(long, default_value_t = 2)]
    k: u32,
    #[command(flatten)]
    grid: GridArgs,
    /// Weight F for kind A (tau, one, id)
    #[arg(long, value_enum)]
    weight: Option<WeightArg>,
    #[arg(long, value_enum, default_value_t = MethodArg::Fast)]
    method: MethodArg,
    /// Write CSV here instead of stdout
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    threads: usize,
}

#[derive(Args)]
pub struct CompareArgs {
    #[arg(long, value_enum)]
    kind: KindArg,
    #[arg(long, default_value_t = 2)]
    k: u32,
    #[command(flatten)]
    grid: GridArgs,
    #[arg(long, value_enum)]
    weight: Option<WeightArg>,
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    threads: usize,
}

#[derive(Args)]
pub struct AsymptArgs {
    #[arg(long, value_enum)]
    kind: KindArg,
    #[arg(long, default_value_t = 2)]
    k: u32,
    #[command(flatten)]
    grid: GridArgs,
    #[arg(long, value_enum)]
    weight: Option<WeightArg>,
    /// Prime cutoff for Euler products
    #[arg(long, default_value_t = 1_000_000)]
    prime_bound: u64,
    /// Series truncation for Dirichlet-series constants
    #[arg(long, default_value_t = 1_000_000)]
    terms: u64,
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    threads: usize,
}

#[derive(Args)]
pub struct ConstantsArgs {
    #[arg(long, default_value_t = 2)]
    k: u32,
    #[arg(long, default_value_t = 1_000_000)]
    prime_bound: u64,
    #[arg(long, default_value_t = 1_000_000)]
    terms: u64,
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Args)]
pub struct BenchArgs {
    #[command(flatten)]
    grid: GridArgs,
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

/// Command outcomes that still produce full output.
pub enum Outcome {
    Clean,
    Mismatch,
}

pub enum CliError {
    Usage(String),
    Compute(String),
}

impl From<gcdsum::Error> for CliError {
    fn from(e: gcdsum::Error) -> Self {
        CliError::Compute(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    print!("{e}");
                    ExitCode::SUCCESS
                }
                _ => {
                    eprint!("{e}");
                    ExitCode::from(1)
                }
            };
        }
    };
    let result = match cli.cmd {
        Cmd::Compute(a) => commands::compute(a),
        Cmd::Compare(a) => commands::compare(a),
        Cmd::Asympt(a) => commands::asympt(a),
        Cmd::Constants(a) => commands::constants(a),
        Cmd::Bench(a) => commands::bench(a),
    };
    match result {
        Ok(Outcome::Clean) => ExitCode::SUCCESS,
        Ok(Outcome::Mismatch) => {
            eprintln!("comparison mismatch");
            ExitCode::from(3)
        }
        Err(CliError::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(CliError::Compute(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
    }
}
