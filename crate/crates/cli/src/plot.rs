//! CSV data behind the usual figures: the final certificate over θ, a
//! `σ_min` grid for contour plots of both pseudospectra, and the restart trace.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use seplam_core::linalg::{eigenvalues, sigma_min_fast};
use seplam_core::{CMatrix, Complex64, SepResult};

use crate::error::CliError;

/// Points per axis of the pseudospectra grid.
pub const GRID_POINTS: usize = 257;

fn num(x: f64) -> String {
    // 17 significant digits.
    format!("{x:.16e}")
}

pub fn certificate_csv(result: &SepResult) -> String {
    let mut out = String::from("theta,value,branch\n");
    for s in &result.final_samples {
        writeln!(out, "{},{},{}", num(s.theta), num(s.value), s.branch).expect("writing to a String");
    }
    out
}

/// Square-ish box around both spectra and the minimizer, padded so that the
/// level curves at `ε` stay inside.
pub fn plot_box(a: &CMatrix, b: &CMatrix, result: &SepResult) -> Result<(Complex64, f64, f64), CliError> {
    let mut pts = eigenvalues(a)?;
    pts.extend(eigenvalues(b)?);
    pts.push(result.minimizer);
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for p in &pts {
        x0 = x0.min(p.re);
        x1 = x1.max(p.re);
        y0 = y0.min(p.im);
        y1 = y1.max(p.im);
    }
    let extent = (x1 - x0).max(y1 - y0);
    let pad = (2.0 * result.epsilon).max(0.25 * extent).max(1e-3);
    let center = Complex64::new(0.5 * (x0 + x1), 0.5 * (y0 + y1));
    Ok((center, 0.5 * (x1 - x0) + pad, 0.5 * (y1 - y0) + pad))
}

pub fn pseudospectra_csv(a: &CMatrix, b: &CMatrix, result: &SepResult, points: usize) -> Result<String, CliError> {
    let (c, hx, hy) = plot_box(a, b, result)?;
    let step = |h: f64, k: usize| -h + 2.0 * h * k as f64 / (points - 1) as f64;
    let mut out = String::from("re,im,sigma_a,sigma_b\n");
    for ky in 0..points {
        for kx in 0..points {
            let z = c + Complex64::new(step(hx, kx), step(hy, ky));
            let sa = sigma_min_fast(a, z)?;
            let sb = sigma_min_fast(b, z)?;
            writeln!(out, "{},{},{},{}", num(z.re), num(z.im), num(sa), num(sb)).expect("writing to a String");
        }
    }
    Ok(out)
}

/// One row per round and restart point; rounds without restart points get a
/// single row with empty restart columns.
pub fn trace_csv(result: &SepResult) -> String {
    let mut out = String::from("round,epsilon,minimizer_re,minimizer_im,certificate_evals,outcome,restart_re,restart_im\n");
    for r in &result.rounds {
        let head = format!("{},{},{},{},{},{}", r.round, num(r.epsilon), num(r.minimizer.re), num(r.minimizer.im), r.certificate_evals, r.outcome.as_str());
        if r.restart_points.is_empty() {
            writeln!(out, "{head},,").expect("writing to a String");
        }
        for p in &r.restart_points {
            writeln!(out, "{head},{},{}", num(p.re), num(p.im)).expect("writing to a String");
        }
    }
    out
}

pub fn emit_plot_data(dir: &Path, a: &CMatrix, b: &CMatrix, result: &SepResult) -> Result<(), CliError> {
    let io = |path: &Path| {
        let path = path.to_path_buf();
        move |source| CliError::Io { path, source }
    };
    fs::create_dir_all(dir).map_err(io(dir))?;
    let files = [
        ("certificate.csv", certificate_csv(result)),
        ("pseudospectra.csv", pseudospectra_csv(a, b, result, GRID_POINTS)?),
        ("trace.csv", trace_csv(result)),
    ];
    for (name, body) in files {
        let p = dir.join(name);
        fs::write(&p, body).map_err(io(&p))?;
    }
    Ok(())
}
