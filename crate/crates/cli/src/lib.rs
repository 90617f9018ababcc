//! Command-line front end for `seplam`.
//!
//! ```text
//! seplam --matrix-a A.mtx --matrix-b B.mtx [--variant demmel|varah] [--tol REAL]
//!        [--fit-tol REAL] [--z-init RE,IM] [--z0 RE,IM] [--rays] [--seed INT]
//!        [--max-restarts INT] [--emit-plot DIR] [--output PATH] [--threads INT]
//! ```
//!
//! The result is printed to stdout as a JSON object (and written to `--output`
//! if given). Exit status is 0 for `CERTIFIED_GLOBAL` and `TOL_STALLED`, 2 for
//! `BUDGET_EXCEEDED` and 1 for input or IO errors. `SEPLAM_THREADS` sets the
//! thread count when `--threads` is absent.

use std::ffi::OsString;
use std::path::PathBuf;
use std::time::Instant;

use clap::Parser;
use serde_json::{json, Value};

use seplam_core::{compute_sep, Complex64, SepResult, SolveOptions, Status, Variant};

pub mod error;
pub mod io;
pub mod plot;

pub use error::CliError;

pub const THREADS_ENV: &str = "SEPLAM_THREADS";

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_BUDGET: i32 = 2;

fn parse_point(s: &str) -> Result<Complex64, String> {
    let (re, im) = s.split_once(',').ok_or_else(|| format!("expected RE,IM, got `{s}`"))?;
    let p = |t: &str| t.trim().parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(|| format!("invalid number `{t}`"));
    Ok(Complex64::new(p(re)?, p(im)?))
}

fn parse_positive(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
        _ => Err(format!("expected a positive number, got `{s}`")),
    }
}

#[derive(Clone, Debug, Parser)]
#[command(name = "seplam", version, about = "Separation of the spectra of two matrices via pseudospectra")]
pub struct RunConfig {
    /// First matrix (Matrix Market or CSV).
    #[arg(long = "matrix-a", value_name = "PATH")]
    pub path_a: PathBuf,
    /// Second matrix (Matrix Market or CSV).
    #[arg(long = "matrix-b", value_name = "PATH")]
    pub path_b: PathBuf,
    #[arg(long, default_value = "demmel")]
    pub variant: Variant,
    /// Relative improvement below which restarts stop.
    #[arg(long, value_name = "REAL", value_parser = parse_positive)]
    pub tol: Option<f64>,
    /// Relative accuracy of the certificate interpolant.
    #[arg(long = "fit-tol", value_name = "REAL", value_parser = parse_positive)]
    pub fit_tol: Option<f64>,
    /// Start of the first local minimization.
    #[arg(long = "z-init", value_name = "RE,IM", value_parser = parse_point, allow_hyphen_values = true)]
    pub z_init: Option<Complex64>,
    /// Certificate search point.
    #[arg(long = "z0", value_name = "RE,IM", value_parser = parse_point, allow_hyphen_values = true)]
    pub z0: Option<Complex64>,
    /// Use rays instead of lines through the search point.
    #[arg(long)]
    pub rays: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long = "max-restarts", value_name = "INT")]
    pub max_restarts: Option<usize>,
    /// Directory for certificate.csv, pseudospectra.csv and trace.csv.
    #[arg(long = "emit-plot", value_name = "DIR")]
    pub emit_plot: Option<PathBuf>,
    /// Also write the JSON result here.
    #[arg(long, value_name = "PATH")]
    pub output: Option<PathBuf>,
    #[arg(long, value_name = "INT")]
    pub threads: Option<usize>,
}

impl RunConfig {
    /// Solver options; `env_threads` is the value of `SEPLAM_THREADS`, used
    /// only when `--threads` is absent.
    pub fn solve_options(&self, env_threads: Option<&str>) -> Result<SolveOptions, CliError> {
        let threads = match (self.threads, env_threads) {
            (Some(t), _) => Some(t),
            (None, Some(s)) if !s.trim().is_empty() => {
                Some(s.trim().parse().map_err(|_| CliError::Args(format!("{THREADS_ENV} must be a positive integer, got `{s}`")))?)
            }
            _ => None,
        };
        let mut o = SolveOptions { variant: self.variant, z_init: self.z_init, z0_override: self.z0, use_lines: !self.rays, seed: self.seed, threads, ..SolveOptions::default() };
        if let Some(t) = self.tol {
            o.rel_term_tol = t;
        }
        if let Some(t) = self.fit_tol {
            o.fit_tol = t;
        }
        if let Some(r) = self.max_restarts {
            o.max_restarts = r;
        }
        o.validate()?;
        Ok(o)
    }
}

fn point(z: Complex64) -> Value {
    json!({ "re": z.re, "im": z.im })
}

fn config_json(cfg: &RunConfig, opts: &SolveOptions) -> Value {
    let path = |p: &Option<PathBuf>| p.as_ref().map(|p| p.display().to_string());
    json!({
        "matrix_a": cfg.path_a.display().to_string(),
        "matrix_b": cfg.path_b.display().to_string(),
        "variant": opts.variant.as_str(),
        "tol": opts.rel_term_tol,
        "fit_tol": opts.fit_tol,
        "z_init": opts.z_init.map(point),
        "z0": opts.z0_override.map(point),
        "rays": !opts.use_lines,
        "seed": opts.seed,
        "max_restarts": opts.max_restarts,
        "threads": opts.threads,
        "emit_plot": path(&cfg.emit_plot),
        "output": path(&cfg.output),
    })
}

/// The JSON result object. Keys are emitted in sorted order.
pub fn result_json(result: &SepResult, cfg: &RunConfig, opts: &SolveOptions, wall_time_seconds: f64) -> Value {
    json!({
        "epsilon": result.epsilon,
        "minimizer": point(result.minimizer),
        "status": result.status.as_str(),
        "restarts": result.restarts,
        "certificate_evals": result.certificate_evals,
        "objective_evals": result.objective_evals,
        "variant": result.variant.as_str(),
        "eps1": result.eps1,
        "eps2": result.eps2,
        "varah_eig_check": result.varah_eig_check,
        "varah_eig_location": result.varah_eig_location.map(point),
        "wall_time_seconds": wall_time_seconds,
        "config": config_json(cfg, opts),
    })
}

pub fn exit_code(status: Status) -> i32 {
    match status {
        Status::CertifiedGlobal | Status::TolStalled => EXIT_OK,
        Status::BudgetExceeded => EXIT_BUDGET,
    }
}

/// Reads both matrices, solves, and writes all requested outputs.
/// Returns the JSON text and the exit code.
pub fn run(cfg: &RunConfig, env_threads: Option<&str>) -> Result<(String, i32), CliError> {
    let opts = cfg.solve_options(env_threads)?;
    let a = io::read_matrix(&cfg.path_a)?;
    let b = io::read_matrix(&cfg.path_b)?;
    let start = Instant::now();
    let result = compute_sep(&a, &b, &opts)?;
    let wall = start.elapsed().as_secs_f64();
    log::info!("{} after {} rounds: epsilon {:e}", result.status.as_str(), result.rounds.len(), result.epsilon);
    if let Some(dir) = &cfg.emit_plot {
        plot::emit_plot_data(dir, &a, &b, &result)?;
    }
    let mut text = serde_json::to_string_pretty(&result_json(&result, cfg, &opts, wall)).expect("JSON values serialize");
    text.push('\n');
    if let Some(out) = &cfg.output {
        std::fs::write(out, &text).map_err(|source| CliError::Io { path: out.clone(), source })?;
    }
    Ok((text, exit_code(result.status)))
}

/// Full command-line entry point: parses `argv` (including the program
/// name), prints the result or a diagnostic, and returns the exit code.
pub fn run_cli<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cfg = match RunConfig::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let env_threads = std::env::var(THREADS_ENV).ok();
    match run(&cfg, env_threads.as_deref()) {
        Ok((text, code)) => {
            print!("{text}");
            code
        }
        Err(e) => {
            eprintln!("seplam: {e}");
            EXIT_INPUT
        }
    }
}
