//! Command-line front end: argument definitions, the JSON envelope and
//! the mapping from library errors to exit codes.

mod commands;
mod pipeline;

use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use turan_core::{Error, Rational, SCHEMA_VERSION};

pub use pipeline::ASYMPTOTIC_LABEL;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INTERNAL: i32 = 1;
pub const EXIT_PARAMETER: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const EXIT_TARGET: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "turan", version, about = "Turán-density interval toolkit")]
pub struct Cli {
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Tolerance override (KKT tolerance for Lagrangians, residual for spectra).
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Worker threads for multi-start and other order-independent sections.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// Synthetic side-density sequence `β_i = α + c/(m₀ + i)` on `m` parts.
#[derive(Debug, Clone, Args)]
pub struct ToyArgs {
    #[arg(long, default_value_t = 6)]
    pub m: usize,
    #[arg(long, default_value = "2/5")]
    pub alpha: String,
    #[arg(long, default_value_t = 0.05)]
    pub c: f64,
    #[arg(long, default_value_t = 10)]
    pub m0: u64,
    /// Number of sequence terms generated.
    #[arg(long, default_value_t = 2000)]
    pub count: usize,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Primes q ≡ 1 (mod 4p) up to a bound.
    Primes {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        bound: u64,
    },
    /// LPS generators and the Cayley graph on PSL₂(F_q).
    Lps {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        q: u64,
        /// Edge-list file for the Cayley graph.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        generators_only: bool,
    },
    /// Spectral report for a graph edge-list file.
    Ramanujan { graph: PathBuf },
    /// Lagrangian of a hypergraph file.
    Lagrangian {
        graph: PathBuf,
        /// Also run the grid oracle at this resolution.
        #[arg(long)]
        oracle: Option<usize>,
        #[arg(long)]
        starts: Option<usize>,
    },
    /// μ(α) and the maximizer parameters q, R.
    Mu {
        #[arg(long)]
        m: usize,
        /// Rational "a/b" or decimal.
        #[arg(long)]
        alpha: String,
    },
    /// Greedy search for an index set whose recursive value is y.
    Target {
        #[arg(long)]
        y: String,
        #[arg(long, default_value_t = 200)]
        depth: usize,
        #[arg(long, default_value_t = 400)]
        tail_depth: usize,
        #[command(flatten)]
        toy: ToyArgs,
    },
    /// Tail brackets (j, ν lower, ν upper) for the synthetic sequence.
    Tails {
        #[command(flatten)]
        toy: ToyArgs,
    },
    /// One-step gap ψ_{α+η}(μ) − μ against Rη over an η ladder.
    Ladder {
        #[arg(long, default_value_t = 6)]
        m: usize,
        #[arg(long, default_value = "2/5")]
        alpha: String,
        #[arg(long, value_delimiter = ',', default_value = "1e-2,1e-3,1e-4,1e-5")]
        etas: Vec<f64>,
    },
    /// Runs every stage and reports pass/fail per stage.
    Pipeline {
        #[arg(long)]
        paper_params: bool,
        #[arg(long)]
        toy_params: bool,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Primes { .. } => "primes",
            Command::Lps { .. } => "lps",
            Command::Ramanujan { .. } => "ramanujan",
            Command::Lagrangian { .. } => "lagrangian",
            Command::Mu { .. } => "mu",
            Command::Target { .. } => "target",
            Command::Tails { .. } => "tails",
            Command::Ladder { .. } => "ladder",
            Command::Pipeline { .. } => "pipeline",
        }
    }
}

/// What a command produced, before formatting.
pub enum Payload {
    Json(Value),
    Csv(String),
    /// A report whose stages did not all pass; printed, then exit 3.
    Failed(Value),
}

pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: Option<String>,
}

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Parameter(_)
        | Error::Domain(_)
        | Error::Capacity(_)
        | Error::Parse(_)
        | Error::Io(_) => EXIT_PARAMETER,
        Error::Convergence { .. } => EXIT_NUMERICAL,
        Error::TargetOutOfRange { .. } => EXIT_TARGET,
        Error::Internal(_) => EXIT_INTERNAL,
    }
}

/// Parses `"a/b"`, an integer, or a decimal.
pub fn parse_number(s: &str) -> Result<(f64, Option<Rational>), Error> {
    let s = s.trim();
    if let Ok(r) = s.parse::<Rational>() {
        return Ok((*r.numer() as f64 / *r.denom() as f64, Some(r)));
    }
    s.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .map(|v| (v, None))
        .ok_or_else(|| Error::Parse(format!("`{s}` is neither a rational a/b nor a number")))
}

fn envelope(cli: &Cli, result: Value, elapsed_ms: u128) -> String {
    let doc = json!({
        "schemaVersion": SCHEMA_VERSION,
        "command": cli.command.name(),
        "result": result,
        "metadata": {
            "version": env!("CARGO_PKG_VERSION"),
            "seed": cli.seed,
            "threads": cli.threads,
            "elapsedMs": elapsed_ms as u64,
        },
    });
    let mut out = serde_json::to_string_pretty(&doc).expect("JSON values always serialize");
    out.push('\n');
    out
}

pub fn execute(cli: &Cli) -> Outcome {
    let start = Instant::now();
    let result = match &cli.command {
        Command::Pipeline {
            paper_params,
            toy_params,
        } => pipeline::run(cli, *paper_params, *toy_params),
        other => commands::run(cli, other),
    };
    let elapsed = start.elapsed().as_millis();
    match result {
        Ok(Payload::Json(v)) => Outcome {
            code: EXIT_OK,
            stdout: envelope(cli, v, elapsed),
            stderr: None,
        },
        Ok(Payload::Csv(s)) => Outcome {
            code: EXIT_OK,
            stdout: s,
            stderr: None,
        },
        Ok(Payload::Failed(v)) => Outcome {
            code: EXIT_NUMERICAL,
            stdout: envelope(cli, v, elapsed),
            stderr: Some("one or more stages failed".into()),
        },
        Err(e) => Outcome {
            code: exit_code(&e),
            stdout: String::new(),
            stderr: Some(e.to_string()),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers() {
        let (v, r) = parse_number("899/900").unwrap();
        assert_eq!(r, Some(Rational::new(899, 900)));
        assert_eq!(v, 899.0 / 900.0);
        assert_eq!(parse_number("0.4").unwrap(), (0.4, None));
        assert_eq!(parse_number("3").unwrap().0, 3.0);
        assert!(parse_number("1/0").is_err());
        assert!(parse_number("abc").is_err());
    }

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&Error::Domain("x".into())), 2);
        assert_eq!(
            exit_code(&Error::Convergence {
                iterations: 1,
                residual: 1.0
            }),
            3
        );
        assert_eq!(
            exit_code(&Error::TargetOutOfRange {
                y: 0.0,
                lower: 0.0,
                upper: 0.0
            }),
            4
        );
    }
}
