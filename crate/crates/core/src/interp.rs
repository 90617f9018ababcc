//! Adaptive piecewise Chebyshev approximation of the certificate.
//!
//! Each piece is sampled at nested Chebyshev–Lobatto points of degree
//! 8, 16, …, 128 and accepted once the trailing coefficients fall below the
//! tolerance. Pieces that do not resolve are bisected. Samples carry a
//! [`Signature`] naming the smooth formula that produced them; when a piece
//! mixes signatures, the transition is located by bisection and split off as
//! a tiny linear piece so the polynomial pieces never straddle a jump.
//!
//! Any OVERLAP sample aborts the fit immediately: it is a witness that the
//! current `ε` is not globally minimal.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::ray_certificate::CertificateSample;

const MIN_DEGREE: usize = 8;
const MAX_DEGREE: usize = 128;
/// Relative width at which a signature transition counts as located.
const EDGE_WIDTH: f64 = 1e-12;
/// Depth marker for a bracketed signature transition.
const JUMP: u32 = u32::MAX;
/// Off-node samples must agree with an accepted piece to this many tolerances.
const SAMPLE_TEST_FACTOR: f64 = 100.0;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FitOptions {
    /// Relative tolerance on the tail of the Chebyshev coefficients.
    pub tol: f64,
    pub max_samples: usize,
    pub max_depth: u32,
    /// Uniformly spaced samples taken before any piece is fitted.
    pub probe_points: usize,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions { tol: 1e-8, max_samples: 100_000, max_depth: 30, probe_points: 128 }
    }
}

/// One polynomial piece on `[lo, hi]` in the Chebyshev basis of the mapped
/// variable `x ∈ [−1, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Piece {
    pub lo: f64,
    pub hi: f64,
    pub coeffs: Vec<f64>,
    pub error_estimate: f64,
    /// Accepted at the depth cap without meeting the tolerance.
    pub over_tolerance: bool,
}

impl Piece {
    fn linear(lo: f64, hi: f64, flo: f64, fhi: f64, over_tolerance: bool) -> Self {
        Piece {
            lo,
            hi,
            coeffs: vec![0.5 * (flo + fhi), 0.5 * (fhi - flo)],
            error_estimate: 0.0,
            over_tolerance,
        }
    }

    fn to_unit(&self, theta: f64) -> f64 {
        if self.hi == self.lo {
            return 0.0;
        }
        ((2.0 * theta - self.lo - self.hi) / (self.hi - self.lo)).clamp(-1.0, 1.0)
    }

    fn from_unit(&self, x: f64) -> f64 {
        0.5 * (self.lo + self.hi) + 0.5 * (self.hi - self.lo) * x
    }

    pub fn evaluate(&self, theta: f64) -> f64 {
        clenshaw(&self.coeffs, self.to_unit(theta))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PiecewiseInterpolant {
    pub pieces: Vec<Piece>,
    /// Distinct sampling angles used, i.e. certificate evaluations.
    pub total_samples: usize,
    /// Every sample taken, sorted by angle.
    pub samples: Vec<CertificateSample>,
}

impl PiecewiseInterpolant {
    pub fn domain(&self) -> (f64, f64) {
        (self.pieces[0].lo, self.pieces[self.pieces.len() - 1].hi)
    }

    pub fn piece_at(&self, theta: f64) -> Result<&Piece> {
        let (lo, hi) = self.domain();
        if !(theta >= lo && theta <= hi) {
            return Err(Error::InvalidArgument(format!("theta = {theta} outside [{lo}, {hi}]")));
        }
        let k = self.pieces.partition_point(|p| p.hi < theta);
        Ok(&self.pieces[k.min(self.pieces.len() - 1)])
    }

    pub fn flagged_pieces(&self) -> usize {
        self.pieces.iter().filter(|p| p.over_tolerance).count()
    }
}

/// Result of a fit.
#[derive(Clone, Debug)]
pub enum FitOutcome {
    Converged(PiecewiseInterpolant),
    /// A negative OVERLAP sample was found.
    Aborted {
        witness_theta: f64,
        witness_sample: CertificateSample,
        /// Logical number of evaluations up to and including the witness.
        samples: usize,
        /// Every sample taken before the witness, sorted by angle.
        taken: Vec<CertificateSample>,
    },
    /// The sample budget ran out; carries what was fitted so far.
    BudgetExceeded(PiecewiseInterpolant),
}

/// Source of certificate samples. A batch is evaluated in order; an
/// implementation may stop after the first OVERLAP sample, which must then be
/// the last element returned.
pub trait BatchSampler {
    fn sample_batch(&self, thetas: &[f64]) -> Result<Vec<CertificateSample>>;
}

/// Sequential sampler over a closure.
pub struct FnSampler<F>(pub F);

impl<F> BatchSampler for FnSampler<F>
where
    F: Fn(f64) -> Result<CertificateSample>,
{
    fn sample_batch(&self, thetas: &[f64]) -> Result<Vec<CertificateSample>> {
        let mut out = Vec::with_capacity(thetas.len());
        for &t in thetas {
            let s = (self.0)(t)?;
            let stop = s.is_overlap();
            out.push(s);
            if stop {
                break;
            }
        }
        Ok(out)
    }
}

/// Chebyshev coefficients from values at `cos(jπ/n)`, `j = 0..=n`.
pub fn chebyshev_coefficients(values: &[f64]) -> Vec<f64> {
    let n = values.len() - 1;
    if n == 0 {
        return vec![values[0]];
    }
    let nf = n as f64;
    let mut c = vec![0.0; n + 1];
    for (k, ck) in c.iter_mut().enumerate() {
        let mut s = 0.0;
        for (j, &v) in values.iter().enumerate() {
            let w = if j == 0 || j == n { 0.5 } else { 1.0 };
            s += w * v * ((j * k % (2 * n)) as f64 * PI / nf).cos();
        }
        *ck = 2.0 * s / nf;
    }
    c[0] *= 0.5;
    c[n] *= 0.5;
    c
}

pub fn clenshaw(c: &[f64], x: f64) -> f64 {
    let (mut b1, mut b2) = (0.0, 0.0);
    for &ck in c.iter().skip(1).rev() {
        let b0 = ck + 2.0 * x * b1 - b2;
        b2 = b1;
        b1 = b0;
    }
    c[0] + x * b1 - b2
}

/// Coefficients of the derivative with respect to `x`.
pub fn chebyshev_derivative(c: &[f64]) -> Vec<f64> {
    let n = c.len() - 1;
    if n == 0 {
        return vec![0.0];
    }
    let mut d = vec![0.0; n + 1];
    for k in (1..=n).rev() {
        d[k - 1] = d.get(k + 1).copied().unwrap_or(0.0) + 2.0 * k as f64 * c[k];
    }
    d[0] *= 0.5;
    d.truncate(n);
    d
}

/// Real roots in `[−1, 1]` from the eigenvalues of the colleague matrix.
pub fn chebyshev_roots(c: &[f64]) -> Vec<f64> {
    let scale = c.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if scale == 0.0 {
        return Vec::new();
    }
    let mut n = c.len() - 1;
    while n > 0 && c[n].abs() <= 1e-13 * scale {
        n -= 1;
    }
    match n {
        0 => Vec::new(),
        1 => {
            let r = -c[0] / c[1];
            if r.abs() <= 1.0 + 1e-10 {
                vec![r.clamp(-1.0, 1.0)]
            } else {
                Vec::new()
            }
        }
        _ => {
            use crate::linalg::CMatrix;
            use num_complex::Complex64;
            let mut m = vec![vec![0.0f64; n]; n];
            m[0][1] = 1.0;
            for i in 1..n {
                m[i][i - 1] = 0.5;
                if i + 1 < n {
                    m[i][i + 1] = 0.5;
                }
            }
            for k in 0..n {
                m[n - 1][k] -= c[k] / (2.0 * c[n]);
            }
            let cm = CMatrix::from_fn(n, n, |i, j| Complex64::new(m[i][j], 0.0));
            let Ok(eigs) = crate::linalg::eigenvalues(&cm) else {
                return Vec::new();
            };
            let mut roots: Vec<f64> = eigs
                .into_iter()
                .filter(|z| z.im.abs() <= 1e-8 * (1.0 + z.re.abs()) && z.re.abs() <= 1.0 + 1e-8)
                .map(|z| z.re.clamp(-1.0, 1.0))
                .collect();
            roots.sort_by(f64::total_cmp);
            roots
        }
    }
}

/// Chebyshev–Lobatto nodes of degree `n` on `[lo, hi]`, in decreasing order
/// of the unit variable. Endpoints and the midpoint are exact so nodes are
/// shared bit-for-bit between nested degrees and adjacent pieces.
fn nodes(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let mid = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    (0..=n)
        .map(|j| {
            if j == 0 {
                hi
            } else if j == n {
                lo
            } else if 2 * j == n {
                mid
            } else {
                mid + half * ((j as f64 * PI) / n as f64).cos()
            }
        })
        .collect()
}

/// Orders `f64` keys by `total_cmp`.
fn key(t: f64) -> i64 {
    let b = t.to_bits() as i64;
    b ^ (((b >> 63) as u64) >> 1) as i64
}

struct Fitter<'s, S: BatchSampler> {
    sampler: &'s S,
    opts: FitOptions,
    cache: BTreeMap<i64, CertificateSample>,
}

enum Halt {
    Abort(CertificateSample, usize),
    Budget,
    Failed(Error),
}

impl From<Error> for Halt {
    fn from(e: Error) -> Self {
        Halt::Failed(e)
    }
}

enum PieceFit {
    Done(Piece),
    Split(Vec<(f64, f64, u32)>),
}

impl<S: BatchSampler> Fitter<'_, S> {
    fn ensure(&mut self, thetas: &[f64]) -> std::result::Result<(), Halt> {
        let mut todo: Vec<f64> = Vec::new();
        for &t in thetas {
            if !self.cache.contains_key(&key(t)) && !todo.iter().any(|x| x.to_bits() == t.to_bits()) {
                todo.push(t);
            }
        }
        if todo.is_empty() {
            return Ok(());
        }
        let room = self.opts.max_samples.saturating_sub(self.cache.len());
        let budget_hit = todo.len() > room;
        todo.truncate(room);
        for s in self.sampler.sample_batch(&todo)? {
            if s.is_overlap() && s.value < 0.0 {
                let n = self.cache.len() + 1;
                return Err(Halt::Abort(s, n));
            }
            self.cache.insert(key(s.theta), s);
        }
        if budget_hit {
            return Err(Halt::Budget);
        }
        Ok(())
    }

    fn sample(&self, t: f64) -> &CertificateSample {
        &self.cache[&key(t)]
    }

    fn value(&self, t: f64) -> f64 {
        self.sample(t).value
    }

    fn in_range(&self, lo: f64, hi: f64) -> impl Iterator<Item = &CertificateSample> {
        self.cache.range(key(lo)..=key(hi)).map(|(_, s)| s)
    }

    /// Narrows `[l, r]` (different signatures at the ends) to the edge width.
    fn locate_edge(&mut self, mut l: f64, mut r: f64) -> std::result::Result<(f64, f64), Halt> {
        let sl = self.sample(l).signature;
        while r - l > EDGE_WIDTH * l.abs().max(r.abs()).max(1.0) {
            let m = 0.5 * (l + r);
            if m <= l || m >= r {
                break;
            }
            self.ensure(&[m])?;
            if self.sample(m).signature == sl {
                l = m;
            } else {
                r = m;
            }
        }
        Ok((l, r))
    }

    fn run(&mut self, lo: f64, hi: f64) -> std::result::Result<Vec<Piece>, Halt> {
        // A uniform probe pass bounds the width of any negative region that
        // could escape detection.
        let k = self.opts.probe_points;
        if k > 0 {
            let probes: Vec<f64> = (0..k).map(|j| lo + (hi - lo) * (j as f64 + 0.5) / k as f64).collect();
            self.ensure(&probes)?;
        }
        let mut done = Vec::new();
        // Depth-first, leftmost piece first.
        let mut stack = vec![(lo, hi, 0u32)];
        while let Some((lo, hi, depth)) = stack.pop() {
            match self.fit_piece(lo, hi, depth)? {
                PieceFit::Done(p) => done.push(p),
                PieceFit::Split(parts) => stack.extend(parts.into_iter().rev()),
            }
        }
        done.sort_by(|a, b| a.lo.total_cmp(&b.lo));
        Ok(done)
    }

    fn fit_piece(&mut self, lo: f64, hi: f64, depth: u32) -> std::result::Result<PieceFit, Halt> {
        if depth == JUMP {
            // Bracketed transition between two signatures.
            self.ensure(&[lo, hi])?;
            return Ok(PieceFit::Done(Piece::linear(lo, hi, self.value(lo), self.value(hi), false)));
        }
        let mut prev_tail = f64::INFINITY;
        let mut n = MIN_DEGREE;
        loop {
            let xs = nodes(lo, hi, n);
            self.ensure(&xs)?;

            // Signature change inside the piece: split at the leftmost edge.
            let edge = {
                let mut it = self.in_range(lo, hi);
                let mut prev = it.next().map(|s| (s.theta, s.signature));
                let mut found = None;
                for s in it {
                    let (pt, ps) = prev.unwrap();
                    if s.signature != ps {
                        found = Some((pt, s.theta));
                        break;
                    }
                    prev = Some((s.theta, s.signature));
                }
                found
            };
            if let Some((a, b)) = edge {
                if depth + 1 > self.opts.max_depth {
                    return Ok(PieceFit::Done(self.capped(lo, hi)));
                }
                let (l, r) = self.locate_edge(a, b)?;
                let d = depth + 1;
                let mut parts = Vec::with_capacity(3);
                if l > lo {
                    parts.push((lo, l, d));
                }
                parts.push((l, r, JUMP));
                if r < hi {
                    parts.push((r, hi, d));
                }
                return Ok(PieceFit::Split(parts));
            }

            let vals: Vec<f64> = xs.iter().map(|&t| self.value(t)).collect();
            let coeffs = chebyshev_coefficients(&vals);
            let scale = vals.iter().fold(1.0f64, |m, v| m.max(v.abs()));
            let tail_from = n - (n / 4).max(2);
            let tail = coeffs[tail_from..].iter().fold(0.0f64, |m, v| m.max(v.abs()));
            if tail <= self.opts.tol * scale {
                let mut coeffs = coeffs;
                let cut = coeffs.iter().rposition(|v| v.abs() > 1e-15 * scale).unwrap_or(0);
                coeffs.truncate(cut + 1);
                let piece = Piece { lo, hi, coeffs, error_estimate: tail, over_tolerance: false };
                // Sample test against every other value seen on the piece.
                let bound = SAMPLE_TEST_FACTOR * self.opts.tol * scale;
                if self.in_range(lo, hi).all(|s| (piece.evaluate(s.theta) - s.value).abs() <= bound) {
                    return Ok(PieceFit::Done(piece));
                }
            }
            let stalled = n > MIN_DEGREE && tail > 0.1 * prev_tail;
            if stalled || n >= MAX_DEGREE {
                let mid = 0.5 * (lo + hi);
                if depth + 1 > self.opts.max_depth || mid <= lo || mid >= hi {
                    return Ok(PieceFit::Done(self.capped(lo, hi)));
                }
                return Ok(PieceFit::Split(vec![(lo, mid, depth + 1), (mid, hi, depth + 1)]));
            }
            prev_tail = tail;
            n *= 2;
        }
    }

    fn capped(&self, lo: f64, hi: f64) -> Piece {
        Piece::linear(lo, hi, self.value(lo), self.value(hi), true)
    }
}

/// Fits `sampler` over `domain` to relative tolerance `opts.tol`.
pub fn fit_adaptive<S: BatchSampler>(sampler: &S, domain: (f64, f64), opts: &FitOptions) -> Result<FitOutcome> {
    let (lo, hi) = domain;
    if !(opts.tol > 0.0) || !(hi > lo) {
        return Err(Error::InvalidArgument(format!("fit needs tol > 0 and a nonempty domain, got tol = {} on [{lo}, {hi}]", opts.tol)));
    }
    let mut f = Fitter { sampler, opts: *opts, cache: BTreeMap::new() };
    match f.run(lo, hi) {
        Ok(pieces) => Ok(FitOutcome::Converged(assemble(pieces, f.cache))),
        Err(Halt::Abort(s, n)) => Ok(FitOutcome::Aborted {
            witness_theta: s.theta,
            witness_sample: s,
            samples: n,
            taken: f.cache.into_values().collect(),
        }),
        Err(Halt::Budget) => {
            let (lo, hi) = domain;
            let samples: Vec<CertificateSample> = f.cache.into_values().collect();
            let partial = partial_interpolant(lo, hi, &samples);
            Ok(FitOutcome::BudgetExceeded(partial))
        }
        Err(Halt::Failed(e)) => Err(e),
    }
}

fn assemble(pieces: Vec<Piece>, cache: BTreeMap<i64, CertificateSample>) -> PiecewiseInterpolant {
    let samples: Vec<CertificateSample> = cache.into_values().collect();
    PiecewiseInterpolant { pieces, total_samples: samples.len(), samples }
}

/// Piecewise-linear interpolant through whatever samples exist.
fn partial_interpolant(lo: f64, hi: f64, samples: &[CertificateSample]) -> PiecewiseInterpolant {
    let mut pieces = Vec::new();
    for w in samples.windows(2) {
        if w[1].theta > w[0].theta {
            pieces.push(Piece::linear(w[0].theta, w[1].theta, w[0].value, w[1].value, true));
        }
    }
    if pieces.is_empty() {
        let v = samples.first().map_or(0.0, |s| s.value);
        pieces.push(Piece::linear(lo, hi, v, v, true));
    }
    PiecewiseInterpolant { pieces, total_samples: samples.len(), samples: samples.to_vec() }
}

/// Evaluates the interpolant at `theta`.
pub fn evaluate(p: &PiecewiseInterpolant, theta: f64) -> Result<f64> {
    Ok(p.piece_at(theta)?.evaluate(theta))
}

/// Local minimizers of every piece (derivative roots and endpoints), sorted
/// by value ascending. Over-tolerance pieces also contribute their samples.
pub fn global_min(p: &PiecewiseInterpolant) -> Vec<(f64, f64)> {
    let mut cand: Vec<(f64, f64)> = Vec::new();
    for piece in &p.pieces {
        cand.push((piece.lo, piece.evaluate(piece.lo)));
        cand.push((piece.hi, piece.evaluate(piece.hi)));
        if piece.coeffs.len() > 2 {
            for x in chebyshev_roots(&chebyshev_derivative(&piece.coeffs)) {
                let t = piece.from_unit(x);
                cand.push((t, piece.evaluate(t)));
            }
        }
        if piece.over_tolerance {
            let from = p.samples.partition_point(|s| s.theta < piece.lo);
            for s in p.samples[from..].iter().take_while(|s| s.theta <= piece.hi) {
                cand.push((s.theta, s.value));
            }
        }
    }
    cand.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.total_cmp(&b.0)));
    cand.dedup_by(|a, b| a.0 == b.0);
    cand
}
