//! Acceptance run: one line per criterion, non-zero exit if any fails.
//!
//! `cargo test -p seplam-cli --test acceptance -- [FILTER...]` runs only the
//! criteria whose names contain one of the filters.

use std::collections::BTreeSet;
use std::fs;
use std::process::Command;
use std::time::Instant;

use rand::Rng;
use serde_json::Value;

use seplam_cli::io::{matrix_market_string, read_matrix, write_matrix_market};
use seplam_core::linalg::{eigenvalues, sigma_min_fast, singular_values};
use seplam_core::objective::eval_objective;
use seplam_core::oracle::problems::{complex_normal, diagonal_pair, rng, shifted_pair};
use seplam_core::oracle::{grid_min, normal_sep, pencil_form_spectrum, theta_scan, GridSpec, ScanEps};
use seplam_core::ray_certificate::{imaginary_crossings, pencil_spectrum};
use seplam_core::{compute_sep_demmel, estimate_sep_varah, select_search_point, validate_search_point, CMatrix, Complex64, SearchFrame, SolveOptions, Status, Variant};

type Check = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn rel(x: f64, y: f64) -> f64 {
    (x - y).abs() / y.abs().max(f64::MIN_POSITIVE)
}

/// The 20 dense pairs shared by the oracle and Varah criteria.
fn oracle_pairs() -> Vec<(usize, CMatrix, CMatrix)> {
    (0..20)
        .map(|k| {
            let n = [5, 8, 10][k % 3];
            let (a, b) = shifted_pair(n, 0.0, 1000 + k as u64).expect("random pair");
            (n, a, b)
        })
        .collect()
}

fn grid_oracle(a: &CMatrix, b: &CMatrix, variant: Variant, zoom_rounds: usize) -> Result<(Complex64, f64), String> {
    let spec = GridSpec::covering(a, b, variant, 401, zoom_rounds, 8.0).map_err(err)?;
    grid_min(a, b, variant, &spec).map_err(err)
}

fn normal_pair_exactness() -> Check {
    let mut g = rng(7);
    let mut worst = 0.0f64;
    let mut cases = 0;
    while cases < 50 {
        let (na, nb) = (g.gen_range(2..=8), g.gen_range(2..=8));
        let (a, b) = diagonal_pair(na, nb, 3.0, &mut g);
        let (ea, eb) = (a.entries().iter().step_by(na + 1).copied().collect::<Vec<_>>(), b.entries().iter().step_by(nb + 1).copied().collect::<Vec<_>>());
        if 2.0 * normal_sep(&ea, &eb, Variant::Demmel) < 0.1 {
            continue;
        }
        cases += 1;
        let want = normal_sep(&ea, &eb, Variant::Demmel);
        let r = compute_sep_demmel(&a, &b, &SolveOptions::default()).map_err(err)?;
        ensure(r.status == Status::CertifiedGlobal, || format!("case {cases}: status {}", r.status.as_str()))?;
        let e = rel(r.epsilon, want);
        ensure(e <= 1e-8, || format!("case {cases}: epsilon {} vs half-gap {want} (rel {e:.1e})", r.epsilon))?;
        worst = worst.max(e);
    }
    Ok(format!("50 pairs, worst rel err {worst:.1e}"))
}

fn oracle_agreement() -> Check {
    let mut worst = 0.0f64;
    for (k, (n, a, b)) in oracle_pairs().into_iter().enumerate() {
        let r = compute_sep_demmel(&a, &b, &SolveOptions::default()).map_err(err)?;
        let (_, o) = grid_oracle(&a, &b, Variant::Demmel, 4)?;
        let e = rel(r.epsilon, o);
        ensure(e <= 1e-4, || format!("pair {k} (n={n}): computed {} vs oracle {o} (rel {e:.1e})", r.epsilon))?;
        ensure(r.epsilon <= o + 1e-8, || format!("pair {k} (n={n}): computed {} exceeds oracle {o}", r.epsilon))?;
        worst = worst.max(e);
    }
    Ok(format!("20 pairs, worst rel diff {worst:.1e}"))
}

/// Pairs each `λ` with the nearest unused element of `others` after mapping.
fn matched(ev: &[Complex64], others: &[Complex64], map: impl Fn(Complex64) -> Complex64, tol: f64) -> Option<f64> {
    let mut used = vec![false; others.len()];
    let mut worst = 0.0f64;
    for &l in ev {
        let t = map(l);
        let (j, d) = others.iter().enumerate().filter(|(j, _)| !used[*j]).map(|(j, m)| (j, (m - t).norm())).min_by(|x, y| x.1.total_cmp(&y.1))?;
        used[j] = true;
        let d = d / l.norm().max(1.0);
        if d > tol {
            return None;
        }
        worst = worst.max(d);
    }
    Some(worst)
}

fn pencil_consistency() -> Check {
    let mut g = rng(11);
    let (mut radii, mut with_crossings, mut worst_sigma) = (0usize, 0usize, 0.0f64);
    for k in 0..200 {
        let n = g.gen_range(2..=8);
        let m = complex_normal(n, &mut g);
        let z0 = Complex64::new(g.gen_range(-2.0..2.0), g.gen_range(-2.0..2.0));
        let eps = g.gen_range(0.05..2.0);
        let theta = g.gen_range(-std::f64::consts::PI..std::f64::consts::PI);
        let frame = SearchFrame::lines(z0);
        let rc = imaginary_crossings(&m, eps, &frame, theta).map_err(err)?;
        for &r in &rc.radii {
            let s = sigma_min_fast(&m, frame.point(r, theta)).map_err(err)?;
            worst_sigma = worst_sigma.max((s - eps).abs());
            ensure((s - eps).abs() <= 1e-6, || format!("sample {k}: sigma_min {s} at r = {r}, eps = {eps}"))?;
        }
        radii += rc.radii.len();
        with_crossings += usize::from(!rc.radii.is_empty());
        // Every imaginary eigenvalue, filtered or not, makes eps a singular value.
        let eigs = pencil_spectrum(&m, eps, &frame, theta).map_err(err)?;
        for l in eigs.iter().filter(|l| l.re == 0.0) {
            let sv = singular_values(&m.shifted(frame.point(l.im, theta))).map_err(err)?;
            let d = sv.iter().map(|s| (s - eps).abs()).fold(f64::INFINITY, f64::min);
            ensure(d <= 1e-6, || format!("sample {k}: i{} gives no singular value near eps = {eps} (off by {d:.1e})", l.im))?;
        }
        let sym = matched(&eigs, &eigs, |l| -l.conj(), 1e-8);
        ensure(sym.is_some(), || format!("sample {k}: spectrum not symmetric under λ ↦ −λ̄"))?;
        if k < 20 {
            let qz = pencil_form_spectrum(&m, eps, z0, theta).map_err(err)?;
            let same = matched(&eigs, &qz, |l| l, 1e-8);
            ensure(same.is_some(), || format!("sample {k}: reduced and pencil spectra differ"))?;
        }
    }
    Ok(format!("200 samples, {radii} radii on {with_crossings} lines, max |sigma - eps| {worst_sigma:.1e}"))
}

fn certificate_sign_test() -> Check {
    let mut mins = Vec::new();
    for k in 0..10 {
        let (a, b) = shifted_pair(6, 0.0, 2000 + k).map_err(err)?;
        // The touching configuration at eps* is only visible to a scan if
        // eps* is accurate far beyond the default oracle resolution.
        let (_, star) = grid_oracle(&a, &b, Variant::Demmel, 14)?;
        let z0 = select_search_point(&a, &b).map_err(err)?;
        let scan = |eps: f64| -> Result<f64, String> {
            let z = validate_search_point(&a, &b, &[eps], z0, k).map_err(err)?;
            Ok(theta_scan(&a, &b, ScanEps::Common(eps), &SearchFrame::lines(z), 4096).map_err(err)?.min_value)
        };
        let (hi, lo, at) = (scan(1.05 * star)?, scan(0.95 * star)?, scan(star)?);
        ensure(hi < 0.0, || format!("pair {k}: min at 1.05 eps* is {hi}"))?;
        ensure(lo >= -1e-9, || format!("pair {k}: min at 0.95 eps* is {lo}"))?;
        ensure((-1e-6..=1e-3).contains(&at), || format!("pair {k}: min at eps* = {star} is {at}"))?;
        mins.push(at);
    }
    let worst = mins.iter().cloned().fold(0.0f64, |m, v| m.max(v.abs()));
    Ok(format!("10 pairs, max |min d| at eps* {worst:.1e}"))
}

fn gradient_check() -> Check {
    let mut g = rng(13);
    let mut worst = 0.0f64;
    let mut checked = 0;
    while checked < 100 {
        let variant = if checked % 2 == 0 { Variant::Demmel } else { Variant::Varah };
        let (a, b) = (complex_normal(6, &mut g), complex_normal(6, &mut g));
        let z = Complex64::new(g.gen_range(-3.0..3.0), g.gen_range(-3.0..3.0));
        let e = eval_objective(&a, &b, z, variant).map_err(err)?;
        let sa = singular_values(&a.shifted(z)).map_err(err)?;
        let sb = singular_values(&b.shifted(z)).map_err(err)?;
        let simple = |s: &[f64]| s[s.len() - 2] - s[s.len() - 1] > 1e-3;
        // Smooth points only: simple smallest singular values and, for the
        // max, a clear winner.
        if !simple(&sa) || !simple(&sb) || (variant == Variant::Demmel && (e.sigma_a - e.sigma_b).abs() < 1e-3) {
            continue;
        }
        let h = 1e-6;
        let f = |w: Complex64| eval_objective(&a, &b, w, variant).map(|e| e.value).map_err(err);
        let gx = (f(z + Complex64::new(h, 0.0))? - f(z - Complex64::new(h, 0.0))?) / (2.0 * h);
        let gy = (f(z + Complex64::new(0.0, h))? - f(z - Complex64::new(0.0, h))?) / (2.0 * h);
        let fd = Complex64::new(gx, gy);
        let an = Complex64::new(e.gradient[0], e.gradient[1]);
        let r = (an - fd).norm() / fd.norm().max(1e-12);
        ensure(r <= 1e-5, || format!("{} at {z}: analytic {an} vs fd {fd} (rel {r:.1e})", variant.as_str()))?;
        worst = worst.max(r);
        checked += 1;
    }
    Ok(format!("100 points, worst rel err {worst:.1e}"))
}

fn restart_behavior() -> Check {
    let (a, b) = shifted_pair(10, 10.0, 3004).map_err(err)?;
    let bad = SolveOptions { z_init: Some(Complex64::new(10.0, 10.0)), ..SolveOptions::default() };
    let r = compute_sep_demmel(&a, &b, &bad).map_err(err)?;
    let reference = compute_sep_demmel(&a, &b, &SolveOptions::default()).map_err(err)?;
    ensure(r.restarts >= 1, || format!("no restarts (epsilon {})", r.epsilon))?;
    let eps: Vec<f64> = r.rounds.iter().map(|x| x.epsilon).collect();
    let mut distinct = eps.clone();
    distinct.dedup();
    ensure(distinct.windows(2).all(|w| w[1] < w[0]), || format!("incumbent sequence not decreasing: {eps:?}"))?;
    ensure(distinct.len() == r.restarts + 1 || r.status == Status::TolStalled, || format!("{} restarts but incumbents {eps:?}", r.restarts))?;
    let d = (r.epsilon - reference.epsilon).abs();
    ensure(d <= 1e-8, || format!("final {} vs spectral-mean start {} (diff {d:.1e})", r.epsilon, reference.epsilon))?;
    Ok(format!("{} restarts, incumbents {:?}", r.restarts, distinct))
}

fn varah_sandwich() -> Check {
    let mut worst = 0.0f64;
    for (k, (_, a, b)) in oracle_pairs().into_iter().enumerate() {
        let d = compute_sep_demmel(&a, &b, &SolveOptions::default()).map_err(err)?.epsilon;
        let v = estimate_sep_varah(&a, &b, &SolveOptions { variant: Variant::Varah, ..SolveOptions::default() }).map_err(err)?;
        let sum = v.eps1.zip(v.eps2).map(|(x, y)| x + y).ok_or("missing eps1/eps2")?;
        let tilde = v.varah_eig_check.ok_or("missing eigenvalue check")?;
        ensure(d <= sum.min(tilde) + 1e-8, || format!("pair {k}: sep_D {d} above min({sum}, {tilde})"))?;
        let mut brute = f64::INFINITY;
        for l in eigenvalues(&b).map_err(err)? {
            brute = brute.min(sigma_min_fast(&a, l).map_err(err)?);
        }
        for l in eigenvalues(&a).map_err(err)? {
            brute = brute.min(sigma_min_fast(&b, l).map_err(err)?);
        }
        ensure((tilde - brute).abs() <= 1e-12, || format!("pair {k}: eigenvalue check {tilde} vs enumeration {brute}"))?;
        worst = worst.max(sum / d);
    }
    Ok(format!("20 pairs, max (eps1+eps2)/sep_D {worst:.3}"))
}

fn shared_spectrum_zero() -> Check {
    let mut worst = 0.0f64;
    for k in 0..5 {
        let a = complex_normal(5, &mut rng(4000 + k));
        let r = compute_sep_demmel(&a, &a, &SolveOptions::default()).map_err(err)?;
        ensure(r.epsilon <= 1e-7, || format!("case {k}: epsilon {}", r.epsilon))?;
        worst = worst.max(r.epsilon);
    }
    Ok(format!("5 cases, max epsilon {worst:.1e}"))
}

fn seplam() -> Command {
    Command::new(env!("CARGO_BIN_EXE_seplam"))
}

fn without_wall_time(json: &str) -> Result<Value, String> {
    let mut v: Value = serde_json::from_str(json).map_err(err)?;
    v.as_object_mut().ok_or("result is not an object")?.remove("wall_time_seconds");
    Ok(v)
}

fn determinism() -> Check {
    let dir = tempfile::tempdir().map_err(err)?;
    let (a, b) = shifted_pair(8, 0.0, 5000).map_err(err)?;
    let (pa, pb) = (dir.path().join("a.mtx"), dir.path().join("b.mtx"));
    write_matrix_market(&pa, &a).map_err(err)?;
    write_matrix_market(&pb, &b).map_err(err)?;
    let run = || -> Result<String, String> {
        let out = seplam().args(["--matrix-a".as_ref(), pa.as_os_str(), "--matrix-b".as_ref(), pb.as_os_str(), "--seed".as_ref(), "3".as_ref()]).output().map_err(err)?;
        ensure(out.status.code() == Some(0), || format!("exit {:?}: {}", out.status.code(), String::from_utf8_lossy(&out.stderr)))?;
        String::from_utf8(out.stdout).map_err(err)
    };
    let (x, y) = (run()?, run()?);
    let (vx, vy) = (without_wall_time(&x)?, without_wall_time(&y)?);
    let (sx, sy) = (serde_json::to_string_pretty(&vx).map_err(err)?, serde_json::to_string_pretty(&vy).map_err(err)?);
    ensure(sx == sy, || "outputs differ".into())?;
    // Apart from the timing line the raw outputs must match too.
    let strip = |s: &str| s.lines().filter(|l| !l.contains("wall_time_seconds")).collect::<Vec<_>>().join("\n");
    ensure(strip(&x) == strip(&y), || "raw outputs differ".into())?;
    Ok(format!("{} bytes identical", sx.len()))
}

const RESULT_KEYS: [&str; 12] = ["epsilon", "minimizer", "status", "restarts", "certificate_evals", "objective_evals", "variant", "eps1", "eps2", "varah_eig_check", "wall_time_seconds", "config"];

fn cli_io() -> Check {
    let dir = tempfile::tempdir().map_err(err)?;
    // Round trip.
    let mut g = rng(6000);
    for n in [1usize, 3, 7] {
        let m = CMatrix::from_fn(n, n, |_, _| Complex64::new(g.gen::<f64>() * 10f64.powi(g.gen_range(-300..300)), -g.gen::<f64>() / 3.0));
        let p = dir.path().join(format!("m{n}.mtx"));
        write_matrix_market(&p, &m).map_err(err)?;
        let back = read_matrix(&p).map_err(err)?;
        let exact = m.entries().iter().zip(back.entries()).all(|(x, y)| x.re.to_bits() == y.re.to_bits() && x.im.to_bits() == y.im.to_bits());
        ensure(exact, || format!("round trip of {n}x{n} not bit-exact"))?;
    }
    let write = |name: &str, m: &CMatrix| -> Result<String, String> {
        let p = dir.path().join(name);
        fs::write(&p, matrix_market_string(m)).map_err(err)?;
        Ok(p.display().to_string())
    };
    let zero = write("zero.mtx", &CMatrix::zeros(1))?;
    let two = write("two.mtx", &CMatrix::from_diagonal(&[Complex64::new(2.0, 0.0)]))?;
    let run = |args: &[&str]| seplam().args(args).output().map_err(err);

    for variant in ["demmel", "varah"] {
        let out = run(&["--matrix-a", &zero, "--matrix-b", &two, "--variant", variant])?;
        ensure(out.status.code() == Some(0), || format!("{variant}: exit {:?}", out.status.code()))?;
        let v: Value = serde_json::from_slice(&out.stdout).map_err(err)?;
        let keys: BTreeSet<&str> = v.as_object().ok_or("not an object")?.keys().map(String::as_str).collect();
        let missing: Vec<&str> = RESULT_KEYS.iter().copied().filter(|k| !keys.contains(k)).collect();
        ensure(missing.is_empty(), || format!("{variant}: missing keys {missing:?}"))?;
        let want = if variant == "demmel" { 1.0 } else { 2.0 };
        let eps = v["epsilon"].as_f64().ok_or("epsilon not a number")?;
        ensure((eps - want).abs() <= 1e-8, || format!("{variant}: epsilon {eps}"))?;
    }

    let missing = dir.path().join("absent.mtx").display().to_string();
    let out = run(&["--matrix-a", &missing, "--matrix-b", &two])?;
    ensure(out.status.code() == Some(1), || format!("missing file: exit {:?}", out.status.code()))?;
    ensure(String::from_utf8_lossy(&out.stderr).contains(&missing), || "stderr does not name the missing path".into())?;
    let out = run(&["--matrix-a", &zero])?;
    ensure(out.status.code() == Some(1), || format!("bad flags: exit {:?}", out.status.code()))?;
    let nonsquare = dir.path().join("rect.csv");
    fs::write(&nonsquare, "1,2\n").map_err(err)?;
    let out = run(&["--matrix-a", &nonsquare.display().to_string(), "--matrix-b", &two])?;
    ensure(out.status.code() == Some(1), || format!("non-square: exit {:?}", out.status.code()))?;

    // A start far from the minimizer needs a restart; forbidding restarts
    // exhausts the budget.
    let (a, b) = shifted_pair(10, 10.0, 3004).map_err(err)?;
    let (pa, pb) = (write("sa.mtx", &a)?, write("sb.mtx", &b)?);
    let out = run(&["--matrix-a", &pa, "--matrix-b", &pb, "--z-init", "10,10", "--max-restarts", "0"])?;
    ensure(out.status.code() == Some(2), || format!("restart budget: exit {:?}", out.status.code()))?;
    let v: Value = serde_json::from_slice(&out.stdout).map_err(err)?;
    ensure(v["status"] == "BUDGET_EXCEEDED", || format!("restart budget: status {}", v["status"]))?;
    Ok("round trip, keys, exit codes 0/1/2".into())
}

fn main() {
    let filters: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let criteria: [(&str, fn() -> Check); 10] = [
        ("normal_pair_exactness", normal_pair_exactness),
        ("oracle_agreement", oracle_agreement),
        ("pencil_consistency", pencil_consistency),
        ("certificate_sign_test", certificate_sign_test),
        ("gradient_check", gradient_check),
        ("restart_behavior", restart_behavior),
        ("varah_sandwich", varah_sandwich),
        ("shared_spectrum_zero", shared_spectrum_zero),
        ("determinism", determinism),
        ("cli_io", cli_io),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        if !filters.is_empty() && !filters.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        let t = Instant::now();
        let res = run();
        let secs = t.elapsed().as_secs_f64();
        match res {
            Ok(detail) => println!("[PASS] {name}: {detail} ({secs:.1}s)"),
            Err(detail) => {
                failed += 1;
                println!("[FAIL] {name}: {detail} ({secs:.1}s)");
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
