//! Command implementations for the `argmin-eig` binary.
//!
//! Every command returns an [`Exit`]: `0` success, `1` bad input or an
//! intended failure path (e.g. a singular shift), `2` an honest negative
//! result (non-convergence, failed certification, failed identity check).

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use argmin_eig::identities::{self, CheckKind, SuiteConfig};
use argmin_eig::io::{parse_matrix, vector_from_json};
use argmin_eig::linalg::residual_ratio;
use argmin_eig::minimizer::{self, certify_pair, MinimizeConfig, DEFAULT_RESTARTS};
use argmin_eig::{oracle, Complex64, ComplexMatrix, ComplexVector, NormKind};
use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::Value;

/// Environment variable limiting worker threads (`0` or unset: automatic).
pub const THREADS_ENV: &str = "ARGMIN_EIG_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "argmin-eig",
    version,
    about = "Eigenpairs by global minimization of ‖Tv − λv‖/‖v‖"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub options: Options,
}

#[derive(Debug, Clone, Args)]
pub struct Options {
    /// Vector norm: one, two or inf [default: two]
    #[arg(long, global = true, value_parser = parse_norm)]
    pub norm: Option<NormKind>,
    /// Residual tolerance [default: 1e-10·(1 + C)]
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Random starts in addition to e₁
    #[arg(long, global = true, default_value_t = DEFAULT_RESTARTS)]
    pub restarts: usize,
    /// Landscape resolution per axis (odd, at least 3)
    #[arg(long, global = true, default_value_t = 101)]
    pub grid: usize,
    /// Include the reference spectrum in the output
    #[arg(long, global = true)]
    pub oracle: bool,
    /// Write the result here instead of stdout
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Find an eigenpair and print its certificate
    Solve { input: PathBuf },
    /// Recompute the residual ratio of a stored pair
    Certify { input: PathBuf, pair: PathBuf },
    /// Run the seeded operator-identity suites
    VerifyIdentities {
        /// Optional matrix used as S in every case
        input: Option<PathBuf>,
        /// Fix n instead of drawing it from 2..=12
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value_t = 100)]
        cases: usize,
        /// Use an eigenvalue of S as σ (exercises the singular path)
        #[arg(long)]
        force_singular: bool,
    },
    /// Sample the residual over the λ search disk as CSV
    Landscape { input: PathBuf },
}

fn parse_norm(s: &str) -> Result<NormKind, String> {
    s.parse().map_err(|e: argmin_eig::Error| e.to_string())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Exit {
    Success = 0,
    InputError = 1,
    Negative = 2,
}

/// Output produced by a command: text for stdout (or `--output`) and an
/// exit status.
#[derive(Debug)]
pub struct Report {
    pub text: String,
    pub exit: Exit,
}

#[derive(Debug)]
pub struct CliError(pub String);

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

type CliResult<T> = Result<T, CliError>;

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError(format!("{}: {e}", path.display())))
}

pub fn load_matrix(path: &Path) -> CliResult<ComplexMatrix> {
    parse_matrix(&read(path)?).map_err(|e| CliError(format!("{}: {e}", path.display())))
}

/// Configures the global thread pool from [`THREADS_ENV`].
pub fn configure_threads() {
    let threads = std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .unwrap_or(0);
    if threads > 0 {
        // Fails only if a pool already exists, in which case it is kept.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    }
}

pub fn run(cli: &Cli) -> CliResult<Report> {
    let opts = &cli.options;
    if opts.grid < 3 || opts.grid.is_multiple_of(2) {
        return Err(CliError(format!(
            "--grid must be odd and at least 3, got {}",
            opts.grid
        )));
    }
    if let Some(tol) = opts.tol {
        if !(tol.is_finite() && tol >= 0.0) {
            return Err(CliError(format!("--tol must be a nonnegative number, got {tol}")));
        }
    }
    match &cli.command {
        Command::Solve { input } => cmd_solve(&load_matrix(input)?, opts),
        Command::Certify { input, pair } => cmd_certify(&load_matrix(input)?, &read(pair)?, pair, opts),
        Command::VerifyIdentities {
            input,
            n,
            cases,
            force_singular,
        } => {
            let operator = input.as_deref().map(load_matrix).transpose()?;
            cmd_verify_identities(SuiteConfig {
                seed: opts.seed,
                cases: *cases,
                n: *n,
                operator,
                force_singular: *force_singular,
            })
        }
        Command::Landscape { input } => cmd_landscape(&load_matrix(input)?, opts),
    }
}

fn minimize_config(opts: &Options) -> MinimizeConfig {
    MinimizeConfig {
        tolerance: opts.tol,
        seed: opts.seed,
        restarts: opts.restarts,
        ..MinimizeConfig::default()
    }
}

#[derive(Serialize)]
struct SolveOutput<'a> {
    #[serde(flatten)]
    certificate: &'a minimizer::Certificate,
    #[serde(skip_serializing_if = "Option::is_none")]
    oracle: Option<Value>,
}

pub fn cmd_solve(t: &ComplexMatrix, opts: &Options) -> CliResult<Report> {
    let norm = opts.norm.unwrap_or_default();
    let certificate = minimizer::minimize(t, norm, &minimize_config(opts));
    let oracle = opts.oracle.then(|| match oracle::reference_spectrum(t) {
        Ok(est) => serde_json::to_value(est).expect("serializable"),
        Err(e) => serde_json::json!({ "error": e.to_string() }),
    });
    let text = serde_json::to_string_pretty(&SolveOutput {
        certificate: &certificate,
        oracle,
    })
    .expect("serializable");
    Ok(Report {
        text: text + "\n",
        exit: if certificate.converged {
            Exit::Success
        } else {
            Exit::Negative
        },
    })
}

/// Reads `{"lambda": [re, im], "v": [[re, im], ...], "norm"?: ...}`; a
/// certificate written by `solve` has this shape.
pub fn parse_pair(text: &str) -> argmin_eig::Result<(ComplexVector, Complex64, Option<NormKind>)> {
    use argmin_eig::Error;
    let value: Value = serde_json::from_str(text).map_err(|e| Error::Parse {
        location: format!("line {}, column {}", e.line(), e.column()),
        message: e.to_string(),
    })?;
    let lambda = value
        .get("lambda")
        .ok_or_else(|| Error::Parse {
            location: "lambda".into(),
            message: "missing field".into(),
        })
        .and_then(|z| {
            argmin_eig::io::complex_from_json(z).map_err(|message| Error::Parse {
                location: "lambda".into(),
                message,
            })
        })?;
    let v = vector_from_json(value.get("v").unwrap_or(&Value::Null), "v")?;
    let norm = match value.get("norm").and_then(Value::as_str) {
        Some(s) => Some(s.parse()?),
        None => None,
    };
    Ok((v, lambda, norm))
}

pub fn cmd_certify(t: &ComplexMatrix, pair_text: &str, pair_path: &Path, opts: &Options) -> CliResult<Report> {
    let (v, lambda, stored_norm) =
        parse_pair(pair_text).map_err(|e| CliError(format!("{}: {e}", pair_path.display())))?;
    let norm = opts.norm.or(stored_norm).unwrap_or_default();
    let check =
        certify_pair(t, &v, lambda, norm, opts.tol).map_err(|e| CliError(format!("{}: {e}", pair_path.display())))?;
    let text = serde_json::to_string_pretty(&check).expect("serializable") + "\n";
    Ok(Report {
        text,
        exit: if check.certified { Exit::Success } else { Exit::Negative },
    })
}

#[derive(Serialize)]
struct SuiteLine<'a> {
    case: usize,
    check: CheckKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    report: Option<&'a identities::IdentityReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

pub fn cmd_verify_identities(config: SuiteConfig) -> CliResult<Report> {
    let entries = identities::run_suite(&config);
    let mut text = String::new();
    let mut errors = 0;
    let mut failures = 0;
    for entry in &entries {
        let line = match &entry.outcome {
            Ok(report) => {
                failures += usize::from(!report.pass());
                SuiteLine {
                    case: entry.case,
                    check: entry.check,
                    report: Some(report),
                    error: None,
                }
            }
            Err(e) => {
                errors += 1;
                SuiteLine {
                    case: entry.case,
                    check: entry.check,
                    report: None,
                    error: Some(e.to_string()),
                }
            }
        };
        text.push_str(&serde_json::to_string(&line).expect("serializable"));
        text.push('\n');
    }
    let exit = if errors > 0 {
        Exit::InputError
    } else if failures > 0 {
        Exit::Negative
    } else {
        Exit::Success
    };
    Ok(Report { text, exit })
}

/// Grid geometry of a landscape: `grid × grid` points on the square
/// `[−half_width, half_width]²`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LandscapeGrid {
    pub half_width: f64,
    pub grid: usize,
}

impl LandscapeGrid {
    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / (self.grid - 1) as f64
    }

    pub fn coordinate(&self, index: usize) -> f64 {
        if 2 * index + 1 == self.grid {
            0.0
        } else {
            -self.half_width + index as f64 * self.spacing()
        }
    }
}

pub fn cmd_landscape(t: &ComplexMatrix, opts: &Options) -> CliResult<Report> {
    let norm = opts.norm.unwrap_or_default();
    let outcome = minimizer::minimize_with_trace(t, norm, &minimize_config(opts));
    let radius = outcome.certificate.domain.radius;
    let geometry = LandscapeGrid {
        half_width: if radius > 0.0 { radius } else { 1.0 },
        grid: opts.grid,
    };
    let best_v = outcome.certificate.v();
    let restart_vs: Vec<&ComplexVector> = outcome.restarts.iter().map(|r| &r.best.v).collect();

    let rows: Vec<String> = (0..geometry.grid)
        .into_par_iter()
        .map(|ix| {
            let re = geometry.coordinate(ix);
            let mut block = String::new();
            for iy in 0..geometry.grid {
                let lambda = Complex64::new(re, geometry.coordinate(iy));
                let restart_min = restart_vs
                    .iter()
                    .map(|v| residual_ratio(t, v, lambda, norm).expect("unit vectors"))
                    .fold(f64::INFINITY, f64::min);
                let fixed = residual_ratio(t, best_v, lambda, norm).expect("unit vector");
                writeln!(block, "{},{},{},{}", lambda.re, lambda.im, restart_min, fixed).expect("string write");
            }
            block
        })
        .collect();

    let mut text = String::from("re,im,restart_min,fixed\n");
    for block in rows {
        text.push_str(&block);
    }
    Ok(Report {
        text,
        exit: Exit::Success,
    })
}

/// Writes the report to `--output` if given, else returns it for stdout.
pub fn emit(report: &Report, output: Option<&Path>) -> CliResult<Option<String>> {
    match output {
        Some(path) => {
            fs::write(path, &report.text).map_err(|e| CliError(format!("{}: {e}", path.display())))?;
            Ok(None)
        }
        None => Ok(Some(report.text.clone())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_centre_is_exact() {
        let g = LandscapeGrid {
            half_width: 7.0,
            grid: 101,
        };
        assert_eq!(g.coordinate(50), 0.0);
        assert_eq!(g.coordinate(0), -7.0);
        assert!((g.coordinate(100) - 7.0).abs() < 1e-12);
    }

    #[test]
    fn pair_parsing() {
        let (v, l, n) = parse_pair(r#"{"lambda": [2, 0], "v": [[1, 0], [0, 0]], "norm": "inf"}"#).unwrap();
        assert_eq!(v, ComplexVector::basis(2, 0));
        assert_eq!(l, Complex64::new(2.0, 0.0));
        assert_eq!(n, Some(NormKind::Inf));
        assert!(parse_pair(r#"{"v": [[1, 0]]}"#).is_err());
        assert!(parse_pair(r#"{"lambda": [1, 0], "v": []}"#).is_err());
    }
}
