use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use proptest::prelude::*;
use serde_json::Value;
use tempfile::TempDir;

use seplam_cli::io::{parse_complex, read_matrix, write_matrix_market};
use seplam_core::oracle::problems::{complex_normal, rng};
use seplam_core::{compute_sep, CMatrix, Complex64, SolveOptions};

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn scalar_pair(dir: &Path) -> (PathBuf, PathBuf) {
    let mm = |v: &str| format!("%%MatrixMarket matrix array real general\n1 1\n{v}\n");
    (write(dir, "a.mtx", &mm("0")), write(dir, "b.mtx", &mm("2")))
}

fn seplam(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_seplam"));
    cmd.args(args).env_remove("SEPLAM_THREADS");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

fn csv_rows(path: &Path) -> Vec<Vec<String>> {
    fs::read_to_string(path).unwrap().lines().skip(1).map(|l| l.split(',').map(str::to_owned).collect()).collect()
}

#[test]
fn scalar_run_writes_plot_files() {
    let dir = TempDir::new().unwrap();
    let (a, b) = scalar_pair(dir.path());
    let plots = dir.path().join("plots");
    let out = seplam(&["--matrix-a", a.to_str().unwrap(), "--matrix-b", b.to_str().unwrap(), "--emit-plot", plots.to_str().unwrap()], &[]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["status"], "CERTIFIED_GLOBAL");
    assert!((v["epsilon"].as_f64().unwrap() - 1.0).abs() <= 1e-8);

    let reference = compute_sep(&read_matrix(&a).unwrap(), &read_matrix(&b).unwrap(), &SolveOptions::default()).unwrap();
    let cert = csv_rows(&plots.join("certificate.csv"));
    assert_eq!(cert.len(), reference.rounds.last().unwrap().certificate_evals);
    assert!(cert.iter().all(|r| r.len() == 3 && r[2] != "OVERLAP"));

    // Grid point nearest z = 1 carries the minimum of max(σA, σB).
    let grid = csv_rows(&plots.join("pseudospectra.csv"));
    assert_eq!(grid.len(), 257 * 257);
    let f = |r: &Vec<String>| r[2].parse::<f64>().unwrap().max(r[3].parse::<f64>().unwrap());
    let at = |r: &Vec<String>| Complex64::new(r[0].parse().unwrap(), r[1].parse().unwrap());
    let min = grid.iter().min_by(|x, y| f(x).total_cmp(&f(y))).unwrap();
    let nearest = grid.iter().min_by(|x, y| (at(x) - 1.0).norm().total_cmp(&(at(y) - 1.0).norm())).unwrap();
    assert_eq!(min, nearest);
    assert!((f(min) - 1.0).abs() <= (at(min) - 1.0).norm() + 1e-12);

    let trace = fs::read_to_string(plots.join("trace.csv")).unwrap();
    assert!(trace.starts_with("round,epsilon,"));
    assert_eq!(trace.lines().count(), 1 + reference.rounds.len());
}

#[test]
fn output_file_matches_stdout() {
    let dir = TempDir::new().unwrap();
    let (a, b) = scalar_pair(dir.path());
    let path = dir.path().join("result.json");
    let out = seplam(&["--matrix-a", a.to_str().unwrap(), "--matrix-b", b.to_str().unwrap(), "--output", path.to_str().unwrap()], &[]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(fs::read(&path).unwrap(), out.stdout);
}

#[test]
fn thread_environment_variable() {
    let dir = TempDir::new().unwrap();
    let (a, b) = scalar_pair(dir.path());
    let base = ["--matrix-a", a.to_str().unwrap(), "--matrix-b", b.to_str().unwrap()];
    let out = seplam(&base, &[("SEPLAM_THREADS", "1")]);
    assert_eq!(json(&out)["config"]["threads"], 1);
    let with_flag: Vec<&str> = base.iter().copied().chain(["--threads", "2"]).collect();
    let out = seplam(&with_flag, &[("SEPLAM_THREADS", "1")]);
    assert_eq!(json(&out)["config"]["threads"], 2);
    let out = seplam(&base, &[("SEPLAM_THREADS", "lots")]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("SEPLAM_THREADS"));
}

#[test]
fn csv_and_matrix_market_inputs_agree() {
    let dir = TempDir::new().unwrap();
    let a = write(dir.path(), "a.csv", "1+2i,0.5\n-1j,3-1e-1i\n");
    let b_mm = "%%MatrixMarket matrix coordinate complex general\n% upper triangle\n2 2 3\n1 1 4 0\n1 2 0 1\n2 2 5 -1\n";
    let b = write(dir.path(), "b.mtx", b_mm);
    let ma = read_matrix(&a).unwrap();
    assert_eq!(ma.get(1, 1), Complex64::new(3.0, -0.1));
    assert_eq!(ma.get(1, 0), Complex64::new(0.0, -1.0));

    // The same matrices in the other format.
    let a2 = dir.path().join("a2.mtx");
    write_matrix_market(&a2, &ma).unwrap();
    let mb = read_matrix(&b).unwrap();
    let b2 = write(
        dir.path(),
        "b2.csv",
        &format!("{}+{}i,{}+{}i\n0,{}{}i\n", mb.get(0, 0).re, mb.get(0, 0).im, mb.get(0, 1).re, mb.get(0, 1).im, mb.get(1, 1).re, mb.get(1, 1).im),
    );
    let run = |x: &Path, y: &Path| json(&seplam(&["--matrix-a", x.to_str().unwrap(), "--matrix-b", y.to_str().unwrap(), "--threads", "1"], &[]));
    let (r1, r2) = (run(&a, &b), run(&a2, &b2));
    assert_eq!(r1["epsilon"], r2["epsilon"]);
    assert_eq!(r1["minimizer"], r2["minimizer"]);
}

#[test]
fn malformed_entry_reports_line() {
    let dir = TempDir::new().unwrap();
    let a = write(dir.path(), "bad.mtx", "%%MatrixMarket matrix array real general\n2 2\n1\n2\nthree\n4\n");
    let (_, b) = scalar_pair(dir.path());
    let out = seplam(&["--matrix-a", a.to_str().unwrap(), "--matrix-b", b.to_str().unwrap()], &[]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("bad.mtx") && err.contains('5'), "{err}");
}

fn finite() -> impl Strategy<Value = f64> {
    prop_oneof![any::<f64>().prop_filter("finite", |v| v.is_finite()), -1e3..1e3f64]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn matrix_market_round_trip(seed in 0u64..10_000, n in 1usize..6, real in any::<bool>()) {
        let mut m = complex_normal(n, &mut rng(seed));
        if real {
            m = CMatrix::from_fn(n, n, |i, j| Complex64::new(m.get(i, j).re, 0.0));
        }
        let dir = TempDir::new().unwrap();
        let p = dir.path().join("m.mtx");
        write_matrix_market(&p, &m).unwrap();
        let back = read_matrix(&p).unwrap();
        for i in 0..n {
            for j in 0..n {
                prop_assert_eq!(back.get(i, j).re.to_bits(), m.get(i, j).re.to_bits());
                prop_assert_eq!(back.get(i, j).im.to_bits(), m.get(i, j).im.to_bits());
            }
        }
    }

    #[test]
    fn complex_literals_parse_exactly(re in finite(), im in finite()) {
        let z = parse_complex(&format!("{re:e}{im:+e}i")).unwrap();
        prop_assert_eq!((z.re.to_bits(), z.im.to_bits()), (re.to_bits(), im.to_bits()));
        let j = parse_complex(&format!("{im}j")).unwrap();
        prop_assert_eq!(j.im, im);
    }
}
