//! `wsum`: weighted exponential sums from the command line.
//!
//! Exit status: 0 on success, 1 on invalid input, 2 when a request exceeds a
//! compute or precision budget.

mod cache;
mod commands;
mod selftest;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

const VERSION: &str = concat!(
    env!("CARGO_PKG_VERSION"),
    " (phases: frac256, 256-bit fixed point; tolerances: recombination 1e-6, engine equivalence 1e-9, golden regression 1e-8)"
);

#[derive(Parser, Debug)]
#[command(name = "wsum", version = VERSION, about = "Weighted exponential sums over polynomial phases")]
pub struct Cli {
    /// Worker threads (default: all cores). Output does not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Directory for cached sieve tables.
    #[arg(long, global = true, env = "WSUM_CACHE")]
    cache: Option<PathBuf>,

    /// Output format; `scan` defaults to csv, everything else to json.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Σ w(n) e(h·f(n)) over a range.
    Sum(SumArgs),
    /// Four-sum decomposition of the τ- or μ²-weighted sum.
    Decompose(DecompArgs),
    /// Dirichlet approximation and arc classification of a coefficient.
    Approx(ApproxArgs),
    /// |S| against the theorem envelope over a grid of N.
    Scan(ScanArgs),
    /// Search for ‖f(n)‖ < n^(−γ/4+ε) over composite or squarefree n.
    Search(SearchArgs),
    /// Existence criterion Σ_h |Σ g(n) e(h f(n))| < (1/6) Σ g(n).
    Criterion(CriterionArgs),
    /// Re-verify a JSON-lines hit file produced by `search`.
    Verify(VerifyArgs),
    /// Run the built-in exactness checks.
    Selftest(SelftestArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum WeightArg {
    #[value(alias = "unit")]
    One,
    Tau,
    Mu,
    Musq,
    Nu,
    Tau3,
    Primelog,
    Omega,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum EngineArg {
    Direct,
    Diff,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum TheoremWeightArg {
    Tau,
    Musq,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum VariantArg {
    Composite,
    Squarefree,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum FilterArg {
    None,
    TauGt2,
    InA,
}

#[derive(Args, Debug)]
pub struct SumArgs {
    /// Polynomial, e.g. "sqrt2*x^2 + 1/3*x".
    #[arg(long)]
    poly: String,
    #[arg(long, value_enum, default_value = "tau")]
    weight: WeightArg,
    /// Range end.
    #[arg(long = "N", value_parser = parse_count)]
    n: u64,
    #[arg(long, default_value_t = 1, value_parser = parse_count)]
    start: u64,
    #[arg(long, value_enum, default_value = "diff")]
    engine: EngineArg,
    /// Phase multiplier h.
    #[arg(long = "h", default_value_t = 1)]
    h: u64,
}

#[derive(Args, Debug)]
pub struct DecompArgs {
    #[arg(long)]
    poly: String,
    #[arg(long, value_enum, default_value = "tau")]
    weight: TheoremWeightArg,
    #[arg(long = "N", value_parser = parse_count)]
    n: u64,
    /// Explicit U (requires --V); otherwise U = V = N^θ.
    #[arg(long = "U", requires = "v")]
    u: Option<f64>,
    #[arg(long = "V", requires = "u")]
    v: Option<f64>,
    #[arg(long, default_value_t = 0.5)]
    theta: f64,
    /// Allow UV > N (the identity stays exact; some sums become empty).
    #[arg(long)]
    relaxed: bool,
}

#[derive(Args, Debug)]
pub struct ApproxArgs {
    /// Coefficient literal: decimal, p/q, or a constant name.
    #[arg(long, allow_hyphen_values = true)]
    alpha: String,
    #[arg(long = "P")]
    p: f64,
    /// Also classify α mod 1 with this Q (needs P ≥ 2Q).
    #[arg(long = "Q")]
    q: Option<u64>,
    /// Also print this many continued-fraction quotients (≤ 64).
    #[arg(long)]
    terms: Option<usize>,
}

#[derive(Args, Debug)]
pub struct ScanArgs {
    #[arg(long)]
    poly: String,
    #[arg(long, value_enum, default_value = "tau")]
    weight: TheoremWeightArg,
    /// "1000,2000,4000" or powers of two "2^10..2^20".
    #[arg(long, default_value = "2^10..2^20")]
    grid: String,
    #[arg(long, default_value_t = 0.5)]
    theta: f64,
    #[arg(long, default_value_t = 0.05)]
    eps: f64,
    /// Arc classification Q (default ⌊√N⌋).
    #[arg(long = "Q")]
    q: Option<u64>,
    /// Report measured engine times; without it `engine_ms` is 0 and the
    /// output is reproducible byte for byte.
    #[arg(long)]
    timing: bool,
}

#[derive(Args, Debug)]
pub struct SearchArgs {
    #[arg(long)]
    poly: String,
    #[arg(long, value_enum, default_value = "composite")]
    variant: VariantArg,
    #[arg(long, default_value_t = 10, value_parser = parse_count)]
    start: u64,
    /// Range end.
    #[arg(long = "N", value_parser = parse_count)]
    n: u64,
    #[arg(long, default_value_t = 0.05)]
    eps: f64,
    /// Maximum number of hits written; the total is reported on stderr.
    #[arg(long, default_value_t = wsum_core::smallfrac::DEFAULT_HIT_CAP)]
    cap: usize,
}

#[derive(Args, Debug)]
pub struct CriterionArgs {
    #[arg(long)]
    poly: String,
    /// Run the full two-sided pipeline on (√N, N] instead of a single criterion.
    #[arg(long)]
    pipeline: bool,
    #[arg(long, value_enum, default_value = "tau")]
    weight: WeightArg,
    #[arg(long, value_enum, default_value = "none")]
    filter: FilterArg,
    #[arg(long, default_value_t = 1, value_parser = parse_count)]
    start: u64,
    #[arg(long = "N", value_parser = parse_count)]
    n: u64,
    #[arg(long = "H", default_value_t = 1)]
    h: u64,
    /// Pipeline ε.
    #[arg(long, default_value_t = 0.05)]
    eps: f64,
    /// Pipeline hit cap per variant.
    #[arg(long, default_value_t = 100)]
    cap: usize,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(long)]
    poly: String,
    #[arg(long, value_enum, default_value = "composite")]
    variant: VariantArg,
    #[arg(long, default_value_t = 0.05)]
    eps: f64,
    /// JSON-lines file written by `search`.
    #[arg(long)]
    input: PathBuf,
}

#[derive(Args, Debug)]
pub struct SelftestArgs {
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

/// Failure of a CLI run, mapped to an exit status.
#[derive(Debug)]
pub enum Failure {
    Invalid(String),
    Budget(String),
}

impl From<wsum_core::Error> for Failure {
    fn from(e: wsum_core::Error) -> Self {
        match e {
            wsum_core::Error::Budget(_) | wsum_core::Error::PhasePrecision { .. } => Failure::Budget(e.to_string()),
            _ => Failure::Invalid(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Invalid(format!("io: {e}"))
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be positive");
            return ExitCode::from(1);
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().expect("global pool set once");
    }
    match commands::run(&cli) {
        Ok(report) => match write_output(cli.out.as_deref(), &report.text) {
            Ok(()) if report.ok => ExitCode::SUCCESS,
            Ok(()) => ExitCode::from(1),
            // A closed downstream pipe (`wsum search ... | head`) is not an error.
            Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(1)
            }
        },
        Err(Failure::Invalid(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Budget(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

/// A count: a plain integer, `1e6`, `2^20`, or with `_` separators.
pub fn parse_count(s: &str) -> Result<u64, String> {
    let t = s.replace('_', "");
    if let Some(e) = t.strip_prefix("2^") {
        return e.parse::<u32>().ok().and_then(|e| 1u64.checked_shl(e)).ok_or_else(|| format!("invalid count {s:?}"));
    }
    if let Ok(v) = t.parse::<u64>() {
        return Ok(v);
    }
    match t.parse::<f64>() {
        Ok(v) if v >= 0.0 && v.fract() == 0.0 && v < 1.8e19 => Ok(v as u64),
        _ => Err(format!("invalid count {s:?}")),
    }
}

fn write_output(path: Option<&std::path::Path>, output: &str) -> std::io::Result<()> {
    match path {
        Some(p) => std::fs::write(p, output),
        None => std::io::stdout().lock().write_all(output.as_bytes()),
    }
}
