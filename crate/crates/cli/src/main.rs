mod problem;
mod render;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use laplace_core::coefficients::{real_from_str, stirling_series, Expansion};
use laplace_core::multiindex::{sphere_moment, MultiIndex};
use laplace_core::number::{parse_rational, Rational};
use laplace_core::oracle::{geometric_grid, inject_error, verify_order};
use laplace_core::series::{invert, ScalarSeries};
use laplace_core::Error;

use problem::{Method, Problem};

#[derive(Parser)]
#[command(name = "laplace", version, about = "Asymptotic expansions of Laplace-type integrals")]
struct Cli {
    /// Cap on worker threads.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Write output here instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq)]
pub enum Format {
    Json,
    Table,
}

#[derive(Subcommand)]
enum Command {
    /// Compute expansion coefficients ζ_0..ζ_N for a problem file.
    Expand {
        input: PathBuf,
        #[arg(long)]
        order: Option<usize>,
        /// auto, general, f0-const, taylor, nondegenerate or one-dim.
        #[arg(long)]
        method: Option<String>,
    },
    /// Compare the expansion with direct quadrature and fit the remainder order.
    Verify {
        input: PathBuf,
        /// Previously computed expansion (JSON from `expand --format json`).
        #[arg(long)]
        expansion: Option<PathBuf>,
        #[arg(long)]
        order: Option<usize>,
        #[arg(long)]
        method: Option<String>,
        #[arg(long, default_value_t = 1e2)]
        k_min: f64,
        #[arg(long, default_value_t = 1e5)]
        k_max: f64,
        #[arg(long, default_value_t = 7)]
        points: usize,
        /// Add 1 to ζ_J before checking (default J = 2).
        #[arg(long, value_name = "J", num_args = 0..=1, default_missing_value = "2")]
        inject_error: Option<usize>,
    },
    /// Exact coefficients of Stirling's series for k!.
    Stirling {
        #[arg(long, default_value_t = 6)]
        terms: usize,
    },
    /// Integral of x^α over the unit sphere in R^d.
    Moments {
        #[arg(long)]
        dim: usize,
        /// Comma-separated exponents.
        #[arg(long, allow_hyphen_values = true)]
        alpha: String,
    },
    /// Reverse u^ν = ρ^ν Σ a_j ρ^j into ρ^q = u^q Σ b_j u^j.
    InvertSeries {
        #[arg(long)]
        nu: String,
        #[arg(long)]
        q: String,
        /// Comma-separated a_0, a_1, ...
        #[arg(long, allow_hyphen_values = true)]
        coeffs: String,
        #[arg(long)]
        order: Option<usize>,
    },
}

/// Failure with its exit status.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        let code = match e {
            Error::Parse(_) | Error::InvalidInput(_) => 2,
            Error::Hypothesis(_)
            | Error::Degenerate(_)
            | Error::InvalidMinimum(_)
            | Error::PathwayMismatch(_) => 3,
            Error::Accuracy { .. } => 5,
        };
        Failure { code, message: e.to_string() }
    }
}

fn io_failure(what: &str, e: std::io::Error) -> Failure {
    Failure { code: 2, message: format!("{what}: {e}") }
}

fn read(path: &PathBuf) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| io_failure(&path.display().to_string(), e))
}

fn method(flag: &Option<String>, problem: &Problem) -> Result<Method, Failure> {
    Ok(match flag {
        Some(m) => m.parse()?,
        None => problem.method,
    })
}

/// Output text plus whether the run counts as a failed verification.
fn run(cli: &Cli) -> Result<(String, bool), Failure> {
    let json = cli.format == Format::Json;
    match &cli.command {
        Command::Expand { input, order, method: m } => {
            let problem = Problem::from_json_str(&read(input)?, *order)?;
            let e = problem.expand(method(m, &problem)?)?;
            Ok((render::expansion(&e, json), false))
        }
        Command::Verify { input, expansion, order, method: m, k_min, k_max, points, inject_error: inject } => {
            let problem = Problem::from_json_str(&read(input)?, *order)?;
            let mut e = match expansion {
                Some(path) => {
                    let v: serde_json::Value = serde_json::from_str(&read(path)?).map_err(|err| Failure {
                        code: 2,
                        message: format!("{}: {err}", path.display()),
                    })?;
                    Expansion::from_json(&v)?
                }
                None => problem.expand(method(m, &problem)?)?,
            };
            if let Some(j) = inject {
                e = inject_error(&e, *j, 1.0);
            }
            let (spec, defaulted) = problem.integrand()?;
            if defaulted {
                eprintln!(
                    "warning: no domain given; integrating over the unit ball. The expansion assumes f stays bounded away from 0 outside every neighborhood of the minimum."
                );
            }
            spec.check()?;
            let grid = geometric_grid(*k_min, *k_max, *points)?;
            let report = verify_order(&spec, &e, &grid)?;
            Ok((render::report(&e, &report, json), !report.pass))
        }
        Command::Stirling { terms } => {
            if *terms == 0 {
                return Err(Failure { code: 2, message: "--terms must be at least 1".into() });
            }
            Ok((render::stirling(&stirling_series(*terms), json), false))
        }
        Command::Moments { dim, alpha } => {
            let entries = alpha
                .split(',')
                .map(|s| s.trim().parse::<u32>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| Failure { code: 2, message: format!("--alpha: {e}") })?;
            if entries.len() != *dim {
                return Err(Failure {
                    code: 2,
                    message: format!("--alpha has {} entries, --dim is {dim}", entries.len()),
                });
            }
            let a = MultiIndex::new(entries);
            Ok((render::moment(&a, &sphere_moment(&a), json), false))
        }
        Command::InvertSeries { nu, q, coeffs, order } => {
            let nu = real_from_str(nu)?;
            let q = real_from_str(q)?;
            let parts: Vec<&str> = coeffs.split(',').map(str::trim).collect();
            let n = order.unwrap_or(parts.len() - 1);
            let exact: Option<Vec<Rational>> = parts.iter().map(|s| parse_rational(s).ok()).collect();
            let inv = match exact {
                Some(mut a) if nu.is_exact() && q.is_exact() => {
                    a.resize(n + 1, Rational::from_integer(0.into()));
                    invert(&ScalarSeries::new(nu, a)?, &q)?.coeffs
                }
                _ => {
                    let mut a = parts
                        .iter()
                        .map(|s| s.parse::<f64>())
                        .collect::<Result<Vec<_>, _>>()
                        .map_err(|e| Failure { code: 2, message: format!("--coeffs: {e}") })?;
                    a.resize(n + 1, 0.0);
                    invert(&ScalarSeries::new(nu, a)?, &q)?.coeffs
                }
            };
            Ok((render::inverted(&inv, json), false))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global() {
            eprintln!("warning: could not set thread count: {e}");
        }
    }
    match run(&cli) {
        Ok((text, failed)) => {
            match &cli.output {
                Some(path) => {
                    if let Err(e) = std::fs::write(path, &text) {
                        eprintln!("error: {}: {e}", path.display());
                        return ExitCode::from(2);
                    }
                }
                None => print!("{text}"),
            }
            if failed {
                eprintln!("error: the expansion failed the remainder-order check");
                ExitCode::from(4)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
