//! Optimization with restarts.
//!
//! A local minimizer of `f` gives a candidate `ε`. The angular certificate is
//! then fitted at that `ε` around a fixed search point: a negative sample
//! means the two pseudospectra overlap, and the overlap region supplies
//! starting points with strictly smaller `f`. A certificate with no negative
//! values (up to a small slack) proves that `ε` is the global minimum.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::interp::{fit_adaptive, global_min, BatchSampler, FitOptions, FitOutcome};
use crate::linalg::{eigenvalues, sigma_min_shifted, singular_values, CMatrix};
use crate::objective::{eval_objective, minimize_local, LocalMinResult, Variant};
use crate::parallel::Executor;
use crate::ray_certificate::{certificate_value_varah, CertificateSample, SearchFrame, IMAG_AXIS_TOL};

/// At most this many restart points are optimized per round.
pub const MAX_FAN_OUT: usize = 5;
/// Argmin angles of a converged interpolant re-checked exactly.
const RECHECK_ANGLES: usize = 8;
const PERTURB_TRIES: usize = 20;

#[derive(Clone, Debug, PartialEq)]
pub struct SolveOptions {
    pub variant: Variant,
    /// Starting point of the first local minimization; the search point if absent.
    pub z_init: Option<Complex64>,
    /// Search point of the certificate; the spectral mean if absent.
    pub z0_override: Option<Complex64>,
    /// Relative improvement below which restarting stops.
    pub rel_term_tol: f64,
    pub fit_tol: f64,
    /// Restart rounds allowed; 0 stops at the first failed certificate.
    pub max_restarts: usize,
    pub use_lines: bool,
    pub seed: u64,
    pub opt_tol: f64,
    /// Certificate evaluations allowed per fit.
    pub max_samples: usize,
    /// Evaluation threads; available parallelism if absent.
    pub threads: Option<usize>,
    pub imag_axis_tol: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            variant: Variant::Demmel,
            z_init: None,
            z0_override: None,
            rel_term_tol: 1e-12,
            fit_tol: 1e-8,
            max_restarts: 30,
            use_lines: true,
            seed: 0,
            opt_tol: 1e-14,
            max_samples: 100_000,
            threads: None,
            imag_axis_tol: IMAG_AXIS_TOL,
        }
    }
}

impl SolveOptions {
    pub fn validate(&self) -> Result<()> {
        let pos = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::Config(format!("{name} must be positive and finite, got {v}")))
            }
        };
        pos("rel_term_tol", self.rel_term_tol)?;
        pos("fit_tol", self.fit_tol)?;
        pos("opt_tol", self.opt_tol)?;
        pos("imag_axis_tol", self.imag_axis_tol)?;
        if self.max_samples < 16 {
            return Err(Error::Config("max_samples must be at least 16".into()));
        }
        if self.threads == Some(0) {
            return Err(Error::Config("threads must be at least 1".into()));
        }
        Ok(())
    }
}

/// How a solve ended.
///
/// For the Varah estimate, `CertifiedGlobal` means the interiors of the two
/// pseudospectra at the returned split do not overlap: a necessary condition
/// for optimality that makes the result a certified upper bound, not a proof
/// of global optimality.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    CertifiedGlobal,
    TolStalled,
    BudgetExceeded,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::CertifiedGlobal => "CERTIFIED_GLOBAL",
            Status::TolStalled => "TOL_STALLED",
            Status::BudgetExceeded => "BUDGET_EXCEEDED",
        }
    }
}

impl std::fmt::Display for Status {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CertificateOutcome {
    /// Not fitted (zero `ε`, or zero `ε₁`/`ε₂` for the Varah split).
    Skipped,
    Converged,
    Aborted,
    /// Converged but the interpolant dipped below the slack with no overlap
    /// sample to restart from.
    Inconclusive,
    BudgetExceeded,
}

impl CertificateOutcome {
    pub fn as_str(self) -> &'static str {
        match self {
            CertificateOutcome::Skipped => "skipped",
            CertificateOutcome::Converged => "converged",
            CertificateOutcome::Aborted => "aborted",
            CertificateOutcome::Inconclusive => "inconclusive",
            CertificateOutcome::BudgetExceeded => "budget_exceeded",
        }
    }
}

/// One round of the restart loop: the incumbent it certified (or failed to)
/// and the restart points it produced.
#[derive(Clone, Debug, PartialEq)]
pub struct RoundRecord {
    pub round: usize,
    pub epsilon: f64,
    pub minimizer: Complex64,
    pub search_point: Complex64,
    pub certificate_evals: usize,
    pub outcome: CertificateOutcome,
    pub restart_points: Vec<Complex64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SepResult {
    pub epsilon: f64,
    pub minimizer: Complex64,
    pub status: Status,
    pub restarts: usize,
    pub certificate_evals: usize,
    pub objective_evals: usize,
    pub variant: Variant,
    pub eps1: Option<f64>,
    pub eps2: Option<f64>,
    pub varah_eig_check: Option<f64>,
    pub varah_eig_location: Option<Complex64>,
    /// Search point before per-round validation.
    pub search_point: Complex64,
    pub rounds: Vec<RoundRecord>,
    /// Samples of the last fitted certificate.
    pub final_samples: Vec<CertificateSample>,
    /// Gap samples clamped from slightly negative values in the last certificate.
    pub clamped_samples: usize,
}

fn check_inputs(a: &CMatrix, b: &CMatrix) -> Result<()> {
    a.require_square()?;
    b.require_square()?;
    a.check_finite()?;
    b.check_finite()
}

/// Mean of the distinct eigenvalues of `A` and `B`, moved to the real axis
/// when both spectra are closed under conjugation.
pub fn select_search_point(a: &CMatrix, b: &CMatrix) -> Result<Complex64> {
    let ea = eigenvalues(a)?;
    let eb = eigenvalues(b)?;
    let mut distinct: Vec<Complex64> = Vec::new();
    for &l in ea.iter().chain(&eb) {
        if !distinct.iter().any(|d| (d - l).norm() <= 1e-10) {
            distinct.push(l);
        }
    }
    let mut mean = distinct.iter().sum::<Complex64>() / distinct.len() as f64;
    let closed = |s: &[Complex64]| s.iter().all(|l| s.iter().any(|m| (m - l.conj()).norm() <= 1e-10 * l.norm().max(1.0)));
    if closed(&ea) && closed(&eb) {
        mean.im = 0.0;
    }
    Ok(mean)
}

fn near_singular_value(a: &CMatrix, b: &CMatrix, eps: &[f64], z: Complex64) -> Result<bool> {
    let mut sv = singular_values(&a.shifted(z))?;
    sv.extend(singular_values(&b.shifted(z))?);
    Ok(eps.iter().any(|&e| sv.iter().any(|&s| (s - e).abs() <= 1e-10 * (1.0 + e))))
}

/// Returns `z0`, or a seeded perturbation of it, such that no value in `eps`
/// is a singular value of `A − z0 I` or `B − z0 I`.
pub fn validate_search_point(a: &CMatrix, b: &CMatrix, eps: &[f64], z0: Complex64, seed: u64) -> Result<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut z = z0;
    for _ in 0..=PERTURB_TRIES {
        if !near_singular_value(a, b, eps, z)? {
            return Ok(z);
        }
        let angle = rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI);
        z += Complex64::from_polar(1e-6 * (1.0 + z.norm()), angle);
    }
    Err(Error::Config(format!("could not move the search point {z0} off the singular values after {PERTURB_TRIES} perturbations")))
}

/// `ε̃ = min(min_{λ∈Λ(B)} σ_min(A − λI), min_{λ∈Λ(A)} σ_min(B − λI))` and the
/// eigenvalue attaining it.
pub fn varah_eigenvalue_check(a: &CMatrix, b: &CMatrix) -> Result<(f64, Complex64)> {
    let mut best = (f64::INFINITY, Complex64::new(0.0, 0.0));
    for (m, other) in [(a, b), (b, a)] {
        for lam in eigenvalues(other)? {
            let s = sigma_min_shifted(m, lam)?;
            if s < best.0 {
                best = (s, lam);
            }
        }
    }
    Ok(best)
}

struct CertificateSampler<'a> {
    a: &'a CMatrix,
    b: &'a CMatrix,
    eps1: f64,
    eps2: f64,
    frame: SearchFrame,
    exec: &'a Executor,
}

impl BatchSampler for CertificateSampler<'_> {
    fn sample_batch(&self, thetas: &[f64]) -> Result<Vec<CertificateSample>> {
        let batch = self.exec.map_until(
            thetas.len(),
            |i| certificate_value_varah(self.a, self.b, self.eps1, self.eps2, &self.frame, thetas[i]),
            CertificateSample::is_overlap,
        )?;
        Ok(batch.items)
    }
}

fn better(x: &LocalMinResult, y: &LocalMinResult) -> bool {
    x.value
        .total_cmp(&y.value)
        .then(x.z_star.re.total_cmp(&y.z_star.re))
        .then(x.z_star.im.total_cmp(&y.z_star.im))
        .is_lt()
}

struct Solver<'a> {
    a: &'a CMatrix,
    b: &'a CMatrix,
    opts: &'a SolveOptions,
    exec: Executor,
    objective_evals: usize,
    /// Varah only: `ε̃` and its eigenvalue, used once as a restart when the
    /// incumbent sits on an eigenvalue and the certificate cannot run.
    eig_restart: Option<(f64, Complex64)>,
}

impl Solver<'_> {
    fn minimize(&mut self, z: Complex64) -> Result<LocalMinResult> {
        let r = minimize_local(self.a, self.b, z, self.opts.variant, self.opts.opt_tol)?;
        self.objective_evals += r.objective_evals;
        if !r.converged {
            log::debug!("local minimization from {z} hit the iteration cap at f = {}", r.value);
        }
        Ok(r)
    }

    /// Optimizes from the most promising candidates, stopping after the
    /// first group that improves on `incumbent` by more than the tolerance.
    fn fan_out(&mut self, candidates: &[Complex64], incumbent: f64) -> Result<Option<LocalMinResult>> {
        let (a, b, variant) = (self.a, self.b, self.opts.variant);
        let values = self.exec.map(candidates.len(), |i| eval_objective(a, b, candidates[i], variant).map(|e| e.value))?;
        self.objective_evals += candidates.len();
        let mut ranked: Vec<(f64, Complex64)> = values.into_iter().zip(candidates.iter().copied()).collect();
        ranked.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.re.total_cmp(&y.1.re)).then(x.1.im.total_cmp(&y.1.im)));
        ranked.dedup_by(|x, y| x.1 == y.1);
        ranked.truncate(MAX_FAN_OUT);

        let threshold = incumbent * (1.0 - self.opts.rel_term_tol);
        let mut best: Option<LocalMinResult> = None;
        for chunk in ranked.chunks(self.exec.threads()) {
            let opt_tol = self.opts.opt_tol;
            let runs = self.exec.map(chunk.len(), |i| minimize_local(a, b, chunk[i].1, variant, opt_tol))?;
            for r in runs {
                self.objective_evals += r.objective_evals;
                if best.as_ref().is_none_or(|bst| better(&r, bst)) {
                    best = Some(r);
                }
            }
            if best.as_ref().is_some_and(|r| r.value < threshold) {
                break;
            }
        }
        Ok(best)
    }

    fn split(&mut self, z: Complex64, value: f64) -> Result<(f64, f64)> {
        Ok(match self.opts.variant {
            Variant::Demmel => (value, value),
            Variant::Varah => {
                let e = eval_objective(self.a, self.b, z, Variant::Varah)?;
                self.objective_evals += 1;
                (e.sigma_a, e.sigma_b)
            }
        })
    }

    fn recheck(&self, sampler: &CertificateSampler<'_>, mins: &[(f64, f64)]) -> Result<Vec<CertificateSample>> {
        let mut thetas: Vec<f64> = Vec::new();
        for &(t, _) in mins {
            if !thetas.iter().any(|&x| (x - t).abs() <= 1e-14 * (1.0 + t.abs())) {
                thetas.push(t);
            }
            if thetas.len() == RECHECK_ANGLES {
                break;
            }
        }
        sampler.sample_batch(&thetas)
    }

    fn run(&mut self) -> Result<SepResult> {
        let (a, b, opts) = (self.a, self.b, self.opts);
        let z0 = match opts.z0_override {
            Some(z) => z,
            None => select_search_point(a, b)?,
        };
        let scale = a.frobenius_norm().max(b.frobenius_norm()).max(1.0);
        let zero_floor = opts.rel_term_tol * scale;

        let mut best = self.minimize(opts.z_init.unwrap_or(z0))?;
        let mut rounds: Vec<RoundRecord> = Vec::new();
        let mut restarts = 0;
        let mut certificate_evals = 0;
        let mut final_samples = Vec::new();
        let mut fit_tol = opts.fit_tol;
        let mut refined = false;
        let status;

        loop {
            let round = rounds.len();
            let (e1, e2) = self.split(best.z_star, best.value)?;
            let mut record = RoundRecord {
                round,
                epsilon: best.value,
                minimizer: best.z_star,
                search_point: z0,
                certificate_evals: 0,
                outcome: CertificateOutcome::Skipped,
                restart_points: Vec::new(),
            };
            if e1.min(e2) <= zero_floor {
                final_samples.clear();
                let jump = self.eig_restart.take().filter(|&(tilde, _)| tilde < best.value * (1.0 - opts.rel_term_tol));
                match jump {
                    Some((_, at)) if restarts < opts.max_restarts => {
                        record.restart_points = vec![at];
                        rounds.push(record);
                        restarts += 1;
                        // f(at) = ε̃, so descent from there beats the incumbent.
                        best = self.minimize(at)?;
                        continue;
                    }
                    _ => {
                        rounds.push(record);
                        status = Status::CertifiedGlobal;
                        break;
                    }
                }
            }

            let zv = validate_search_point(a, b, &[e1, e2], z0, opts.seed.wrapping_add(round as u64))?;
            record.search_point = zv;
            let mut frame = SearchFrame::new(zv, opts.use_lines);
            frame.imag_axis_tol = opts.imag_axis_tol;
            let sampler = CertificateSampler { a, b, eps1: e1, eps2: e2, frame, exec: &self.exec };
            let fit = FitOptions { tol: fit_tol, max_samples: opts.max_samples, ..FitOptions::default() };
            let slack = 1e-6 * (1.0 + best.value);

            let candidates: Vec<Complex64> = match fit_adaptive(&sampler, frame.domain(), &fit)? {
                FitOutcome::BudgetExceeded(p) => {
                    record.certificate_evals = p.total_samples;
                    record.outcome = CertificateOutcome::BudgetExceeded;
                    certificate_evals += p.total_samples;
                    final_samples = p.samples;
                    rounds.push(record);
                    status = Status::BudgetExceeded;
                    break;
                }
                FitOutcome::Aborted { witness_sample, samples, mut taken, .. } => {
                    record.certificate_evals = samples;
                    record.outcome = CertificateOutcome::Aborted;
                    certificate_evals += samples;
                    let pts = restart_points(&witness_sample);
                    taken.push(witness_sample);
                    taken.sort_by(|x, y| x.theta.total_cmp(&y.theta));
                    final_samples = taken;
                    pts
                }
                FitOutcome::Converged(p) => {
                    let mins = global_min(&p);
                    let checks = self.recheck(&sampler, &mins)?;
                    let evals = p.total_samples + checks.len();
                    record.certificate_evals = evals;
                    certificate_evals += evals;
                    let witness = checks.iter().find(|s| s.is_overlap()).cloned();
                    let mut samples = p.samples;
                    samples.extend(checks);
                    samples.sort_by(|x, y| x.theta.total_cmp(&y.theta));
                    final_samples = samples;
                    match witness {
                        Some(w) => {
                            record.outcome = CertificateOutcome::Aborted;
                            restart_points(&w)
                        }
                        None if mins[0].1 >= -slack => {
                            record.outcome = CertificateOutcome::Converged;
                            rounds.push(record);
                            status = Status::CertifiedGlobal;
                            break;
                        }
                        None => {
                            record.outcome = CertificateOutcome::Inconclusive;
                            rounds.push(record);
                            if refined {
                                log::warn!("certificate interpolant dips to {} without an overlap sample", mins[0].1);
                                status = Status::BudgetExceeded;
                                break;
                            }
                            refined = true;
                            fit_tol /= 10.0;
                            continue;
                        }
                    }
                }
            };

            record.restart_points = candidates.clone();
            rounds.push(record);
            if restarts >= opts.max_restarts {
                status = Status::BudgetExceeded;
                break;
            }
            restarts += 1;
            fit_tol = opts.fit_tol;
            refined = false;
            match self.fan_out(&candidates, best.value)? {
                Some(r) if r.value < best.value => {
                    let gain = (best.value - r.value) / best.value.max(f64::MIN_POSITIVE);
                    best = r;
                    if gain <= opts.rel_term_tol {
                        rounds.push(RoundRecord {
                            round: rounds.len(),
                            epsilon: best.value,
                            minimizer: best.z_star,
                            search_point: z0,
                            certificate_evals: 0,
                            outcome: CertificateOutcome::Skipped,
                            restart_points: Vec::new(),
                        });
                        status = Status::TolStalled;
                        break;
                    }
                }
                _ => {
                    log::warn!("no restart point improved on eps = {}", best.value);
                    status = Status::TolStalled;
                    break;
                }
            }
        }

        let (eps1, eps2) = match opts.variant {
            Variant::Demmel => (None, None),
            Variant::Varah => {
                let (x, y) = self.split(best.z_star, best.value)?;
                (Some(x), Some(y))
            }
        };
        let clamped_samples = final_samples.iter().filter(|s| s.clamped).count();
        if clamped_samples > 0 {
            log::debug!("{clamped_samples} gap samples were clamped to zero in the final certificate");
        }
        Ok(SepResult {
            epsilon: best.value,
            minimizer: best.z_star,
            status,
            restarts,
            certificate_evals,
            objective_evals: self.objective_evals,
            variant: opts.variant,
            eps1,
            eps2,
            varah_eig_check: None,
            varah_eig_location: None,
            search_point: z0,
            rounds,
            final_samples,
            clamped_samples,
        })
    }
}

/// Boundary points of the overlap first, then interior midpoints.
fn restart_points(s: &CertificateSample) -> Vec<Complex64> {
    s.overlap_boundary.iter().chain(&s.overlap_interior).copied().collect()
}

/// Solves for the variant selected in `opts`.
pub fn compute_sep(a: &CMatrix, b: &CMatrix, opts: &SolveOptions) -> Result<SepResult> {
    match opts.variant {
        Variant::Demmel => compute_sep_demmel(a, b, opts),
        Variant::Varah => estimate_sep_varah(a, b, opts),
    }
}

/// Demmel's separation `min_z max(σ_min(A − zI), σ_min(B − zI))`.
pub fn compute_sep_demmel(a: &CMatrix, b: &CMatrix, opts: &SolveOptions) -> Result<SepResult> {
    check_inputs(a, b)?;
    opts.validate()?;
    let opts = SolveOptions { variant: Variant::Demmel, ..opts.clone() };
    Solver { a, b, opts: &opts, exec: Executor::new(opts.threads), objective_evals: 0, eig_restart: None }.run()
}

/// Upper estimate of Varah's separation: a split `ε₁ + ε₂` at a local
/// minimizer of `σ_min(A − zI) + σ_min(B − zI)` whose pseudospectra have
/// disjoint interiors, plus the eigenvalue check `ε̃`.
///
/// A search that stops on an eigenvalue is restarted once from the eigenvalue
/// attaining `ε̃`, so the estimate never exceeds `ε̃`.
pub fn estimate_sep_varah(a: &CMatrix, b: &CMatrix, opts: &SolveOptions) -> Result<SepResult> {
    check_inputs(a, b)?;
    opts.validate()?;
    let opts = SolveOptions { variant: Variant::Varah, ..opts.clone() };
    let (tilde, at) = varah_eigenvalue_check(a, b)?;
    let mut r = Solver { a, b, opts: &opts, exec: Executor::new(opts.threads), objective_evals: 0, eig_restart: Some((tilde, at)) }.run()?;
    r.varah_eig_check = Some(tilde);
    r.varah_eig_location = Some(at);
    if tilde < r.epsilon {
        log::info!("eigenvalue check {tilde} at {at} is below the split estimate {}", r.epsilon);
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn diag(v: &[Complex64]) -> CMatrix {
        CMatrix::from_diagonal(v)
    }

    fn seq() -> SolveOptions {
        SolveOptions { threads: Some(1), ..SolveOptions::default() }
    }

    #[test]
    fn search_point_examples() {
        let z = select_search_point(&diag(&[c(0.0, 0.0), c(2.0, 0.0)]), &diag(&[c(4.0, 0.0)])).unwrap();
        assert!((z - c(2.0, 0.0)).norm() < 1e-14);
        let z = select_search_point(&diag(&[c(0.0, 1.0), c(0.0, -1.0)]), &diag(&[c(1.0, 0.0)])).unwrap();
        assert!((z - c(1.0 / 3.0, 0.0)).norm() < 1e-14 && z.im == 0.0);
        let d = diag(&[c(1.0, 0.0), c(3.0, 0.0)]);
        let z = select_search_point(&d, &d).unwrap();
        assert!((z - c(2.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn search_point_validation() {
        let (a, b) = (diag(&[c(0.0, 0.0)]), diag(&[c(3.0, 0.0)]));
        let moved = validate_search_point(&a, &b, &[0.5], c(0.5, 0.0), 7).unwrap();
        assert!(moved != c(0.5, 0.0));
        assert!((moved - c(0.5, 0.0)).norm() <= 1.5e-6 * 1.5 * 2.0);
        assert_eq!(validate_search_point(&a, &b, &[0.5], c(0.37, 0.0), 7).unwrap(), c(0.37, 0.0));
        assert_eq!(
            validate_search_point(&a, &b, &[0.5], c(0.5, 0.0), 11).unwrap(),
            validate_search_point(&a, &b, &[0.5], c(0.5, 0.0), 11).unwrap()
        );
    }

    #[test]
    fn scalar_pair_is_certified() {
        let r = compute_sep_demmel(&diag(&[c(0.0, 0.0)]), &diag(&[c(2.0, 0.0)]), &seq()).unwrap();
        assert!((r.epsilon - 1.0).abs() < 1e-8, "{r:?}");
        assert!((r.minimizer - c(1.0, 0.0)).norm() < 1e-6);
        assert_eq!(r.status, Status::CertifiedGlobal);
    }

    #[test]
    fn diagonal_pair_half_gap() {
        let a = diag(&[c(0.0, 0.0), c(0.0, 4.0)]);
        let b = diag(&[c(2.0, 0.0), c(5.0, 5.0)]);
        let r = compute_sep_demmel(&a, &b, &seq()).unwrap();
        assert!((r.epsilon - 1.0).abs() < 1e-8, "{r:?}");
        assert_eq!(r.status, Status::CertifiedGlobal);
    }

    #[test]
    fn varah_scalar_pair() {
        let r = estimate_sep_varah(&diag(&[c(0.0, 0.0)]), &diag(&[c(2.0, 0.0)]), &seq()).unwrap();
        assert!((r.epsilon - 2.0).abs() < 1e-8, "{r:?}");
        assert!((r.eps1.unwrap() + r.eps2.unwrap() - r.epsilon).abs() < 1e-12);
        assert!((r.varah_eig_check.unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn eigenvalue_check_examples() {
        let (t, at) = varah_eigenvalue_check(&diag(&[c(0.0, 0.0)]), &diag(&[c(2.0, 0.0)])).unwrap();
        assert!((t - 2.0).abs() < 1e-14);
        assert!(at == c(0.0, 0.0) || at == c(2.0, 0.0));
        let d = diag(&[c(1.0, 1.0), c(-2.0, 0.5)]);
        assert!(varah_eigenvalue_check(&d, &d).unwrap().0 < 1e-14);
    }

    #[test]
    fn options_are_validated() {
        let bad = SolveOptions { fit_tol: 0.0, ..SolveOptions::default() };
        assert!(matches!(bad.validate(), Err(Error::Config(_))));
        let bad = SolveOptions { max_samples: 4, ..SolveOptions::default() };
        assert!(bad.validate().is_err());
    }
}
