//! Angular certificate machinery.
//!
//! Around a search point `z0`, each angle `θ` defines a ray `z0 + r e^{iθ}`
//! (`r > 0`) or a line (`r ∈ ℝ`). The points where the ray meets the level set
//! `{σ(M − zI) = ε}` are `r` with `i r` an eigenvalue of the `2k × 2k` matrix
//!
//! ```text
//! C_θ = i [ e^{−iθ}(M − z0 I)   −ε e^{−iθ} I        ]
//!         [ −ε e^{iθ} I          e^{iθ}(M − z0 I)ᴴ  ]
//! ```
//!
//! whose spectrum is symmetric under `λ ↦ −λ̄`. From these crossings we build
//! the three-branch certificate `d_ε(θ)`:
//!
//! * `a + b` (SUM) when the ray misses one of the two pseudospectra, where
//!   `a`, `b` measure how far the nearest pencil eigenvalue is from the axis;
//! * `−μ(ray ∩ Λ_ε(A) ∩ Λ_ε(B))` (OVERLAP) when the interiors overlap;
//! * the boundary gap `d^AB ≥ 0` (GAP) otherwise.
//!
//! A certificate that is nonnegative at every angle proves that `ε` is not
//! above the separation.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{eigenvalues, sigma_min_fast, CMatrix};

/// Default relative threshold below which `Re λ` is treated as zero.
pub const IMAG_AXIS_TOL: f64 = 1e-8;

/// Radii closer than `DEDUP_TOL·(1 + |r|)` are the same crossing.
const DEDUP_TOL: f64 = 1e-10;

/// Intersections shorter than `TOUCH_TOL·(1 + |r|)` are touches, not overlaps.
const TOUCH_TOL: f64 = 1e-9;

/// A reported radius whose `σ_min` is below `ε` by more than this (relative)
/// is a crossing of a larger singular value inside the pseudospectrum.
const INTERIOR_TOL: f64 = 1e-6;

/// Gap candidates closer than this (relative) are treated as tied.
const GAP_TIE_TOL: f64 = 1e-11;

/// Search point and angular parameterization.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SearchFrame {
    pub z0: Complex64,
    /// Lines through `z0` (domain `[0, π]`) instead of rays (domain `(−π, π]`).
    pub use_lines: bool,
    pub imag_axis_tol: f64,
}

impl SearchFrame {
    pub fn new(z0: Complex64, use_lines: bool) -> Self {
        SearchFrame { z0, use_lines, imag_axis_tol: IMAG_AXIS_TOL }
    }

    pub fn rays(z0: Complex64) -> Self {
        Self::new(z0, false)
    }

    pub fn lines(z0: Complex64) -> Self {
        Self::new(z0, true)
    }

    /// Angular domain. Rays use `(−π, π]`; the closed interval is returned
    /// since the endpoints coincide.
    pub fn domain(&self) -> (f64, f64) {
        if self.use_lines {
            (0.0, PI)
        } else {
            (-PI, PI)
        }
    }

    pub fn point(&self, r: f64, theta: f64) -> Complex64 {
        self.z0 + Complex64::from_polar(r, theta)
    }
}

/// Level-set crossings along one ray or line.
///
/// `inside[j]` classifies the open interval between consecutive radii; the
/// first interval starts at `0` for rays and at `−∞` for lines, the last one
/// is unbounded.
#[derive(Clone, Debug, PartialEq)]
pub struct RayCrossings {
    pub radii: Vec<f64>,
    pub inside: Vec<bool>,
}

impl RayCrossings {
    /// Inside intervals as `(lo, hi)` pairs, increasing.
    pub fn inside_intervals(&self, use_lines: bool) -> Vec<(f64, f64)> {
        let mut out = Vec::new();
        for (j, &ins) in self.inside.iter().enumerate() {
            if !ins {
                continue;
            }
            let lo = if j == 0 {
                if use_lines {
                    f64::NEG_INFINITY
                } else {
                    0.0
                }
            } else {
                self.radii[j - 1]
            };
            let hi = self.radii.get(j).copied().unwrap_or(f64::INFINITY);
            out.push((lo, hi));
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Branch {
    Sum,
    Overlap,
    Gap,
}

impl Branch {
    pub fn as_str(self) -> &'static str {
        match self {
            Branch::Sum => "SUM",
            Branch::Overlap => "OVERLAP",
            Branch::Gap => "GAP",
        }
    }
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Which smooth formula produced a sample. Within an interval of constant
/// signature the certificate is smooth; across a change it may jump or kink.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct Signature {
    pub branch: Option<Branch>,
    pub a_zero: bool,
    pub b_zero: bool,
    pub crossings_a: u32,
    pub crossings_b: u32,
    /// 0 when `d^A` attains the gap, 1 for `d^B`.
    pub side: u8,
    /// Index of the attaining radius on that side.
    pub index: u32,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CertificateSample {
    pub theta: f64,
    pub value: f64,
    pub branch: Branch,
    /// Endpoints of the overlap intervals along the ray, excluding `z0`.
    pub overlap_boundary: Vec<Complex64>,
    /// Midpoints of the overlap intervals; strictly inside both pseudospectra.
    pub overlap_interior: Vec<Complex64>,
    /// The gap value was slightly negative and has been clamped to zero.
    pub clamped: bool,
    pub signature: Signature,
}

impl CertificateSample {
    /// A sample carrying only a value; negative values are tagged OVERLAP.
    /// Intended for driving the fitter with arbitrary functions.
    pub fn synthetic(theta: f64, value: f64) -> Self {
        let branch = if value < 0.0 { Branch::Overlap } else { Branch::Gap };
        CertificateSample {
            theta,
            value,
            branch,
            overlap_boundary: Vec::new(),
            overlap_interior: Vec::new(),
            clamped: false,
            signature: Signature::default(),
        }
    }

    pub fn is_overlap(&self) -> bool {
        self.branch == Branch::Overlap
    }
}

/// Builds `C_θ` for `M`, `ε` and the frame's `z0`.
pub fn build_rotated_matrix(m: &CMatrix, eps: f64, frame: &SearchFrame, theta: f64) -> CMatrix {
    let k = m.rows();
    let i = Complex64::new(0.0, 1.0);
    let em = Complex64::from_polar(1.0, -theta);
    let ep = Complex64::from_polar(1.0, theta);
    let zero = Complex64::new(0.0, 0.0);
    let z0 = frame.z0;
    CMatrix::from_fn(2 * k, 2 * k, |r, c| {
        let block = match (r < k, c < k) {
            (true, true) => {
                let v = m.get(r, c) - if r == c { z0 } else { zero };
                em * v
            }
            (true, false) => {
                if r == c - k {
                    em * (-eps)
                } else {
                    zero
                }
            }
            (false, true) => {
                if r - k == c {
                    ep * (-eps)
                } else {
                    zero
                }
            }
            (false, false) => {
                let (rr, cc) = (r - k, c - k);
                let v = (m.get(cc, rr) - if rr == cc { z0 } else { zero }).conj();
                ep * v
            }
        };
        i * block
    })
}

/// Eigenvalues of `C_θ` with near-axis real parts snapped to zero.
pub fn pencil_spectrum(m: &CMatrix, eps: f64, frame: &SearchFrame, theta: f64) -> Result<Vec<Complex64>> {
    let c = build_rotated_matrix(m, eps, frame, theta);
    let mut eigs = eigenvalues(&c)?;
    for lam in &mut eigs {
        if lam.re.abs() <= frame.imag_axis_tol * lam.norm().max(1.0) {
            lam.re = 0.0;
        }
    }
    Ok(eigs)
}

fn arg_min_sq_from(eigs: &[Complex64], use_lines: bool) -> f64 {
    let mut best = f64::INFINITY;
    for lam in eigs {
        if lam.re == 0.0 && lam.im == 0.0 {
            continue;
        }
        // Angle of the mirrored eigenvalue in the closed left half-plane
        // measured from the positive imaginary axis.
        let im = if use_lines { lam.im.abs() } else { lam.im };
        let ang = lam.re.abs().atan2(im);
        best = best.min(ang * ang);
    }
    if best.is_finite() {
        best
    } else {
        PI * PI
    }
}

fn crossings_from(
    m: &CMatrix,
    eps: f64,
    frame: &SearchFrame,
    theta: f64,
    eigs: &[Complex64],
) -> Result<RayCrossings> {
    let mut cand: Vec<f64> = eigs
        .iter()
        .filter(|l| l.re == 0.0)
        .map(|l| l.im)
        .filter(|&r| if frame.use_lines { r != 0.0 } else { r > 0.0 })
        .collect();
    cand.sort_by(f64::total_cmp);
    let mut radii: Vec<f64> = Vec::with_capacity(cand.len());
    for r in cand {
        match radii.last() {
            Some(&prev) if (r - prev).abs() <= DEDUP_TOL * (1.0 + r.abs()) => {}
            _ => radii.push(r),
        }
    }
    let floor = eps - INTERIOR_TOL * eps.max(1.0);
    let mut kept = Vec::with_capacity(radii.len());
    for r in radii {
        if sigma_min_fast(m, frame.point(r, theta))? >= floor {
            kept.push(r);
        }
    }
    let radii = kept;

    let n = radii.len();
    let mut inside = vec![false; n + 1];
    for j in 0..=n {
        let bounded_below = j > 0 || !frame.use_lines;
        if j == n || !bounded_below {
            continue;
        }
        let lo = if j == 0 { 0.0 } else { radii[j - 1] };
        let mid = 0.5 * (lo + radii[j]);
        inside[j] = sigma_min_fast(m, frame.point(mid, theta))? <= eps;
    }
    Ok(RayCrossings { radii, inside })
}

/// Level-set crossings of `σ_min(M − zI) = ε` along the ray or line at `θ`.
pub fn imaginary_crossings(m: &CMatrix, eps: f64, frame: &SearchFrame, theta: f64) -> Result<RayCrossings> {
    let eigs = pencil_spectrum(m, eps, frame, theta)?;
    crossings_from(m, eps, frame, theta, &eigs)
}

/// `a_ε(θ)`: squared angle between the positive imaginary axis and the
/// nearest eigenvalue of `C_θ` (either half of the axis for lines). Zero iff
/// the ray meets the `ε`-level set.
pub fn arg_min_sq(m: &CMatrix, eps: f64, frame: &SearchFrame, theta: f64) -> Result<f64> {
    let eigs = pencil_spectrum(m, eps, frame, theta)?;
    Ok(arg_min_sq_from(&eigs, frame.use_lines))
}

#[derive(Clone, Debug, PartialEq)]
pub struct OverlapMeasure {
    /// `−(length of the intersection)`, nonpositive.
    pub l: f64,
    pub boundary: Vec<Complex64>,
    pub interior: Vec<Complex64>,
}

fn overlap_from(ca: &RayCrossings, cb: &RayCrossings, frame: &SearchFrame, theta: f64) -> OverlapMeasure {
    let ia = ca.inside_intervals(frame.use_lines);
    let ib = cb.inside_intervals(frame.use_lines);
    let (mut i, mut j) = (0, 0);
    let mut total = 0.0;
    let mut boundary = Vec::new();
    let mut interior = Vec::new();
    while i < ia.len() && j < ib.len() {
        let lo = ia[i].0.max(ib[j].0);
        let hi = ia[i].1.min(ib[j].1);
        let scale = 1.0 + lo.abs().max(hi.abs());
        if hi - lo > TOUCH_TOL * scale && lo.is_finite() && hi.is_finite() {
            total += hi - lo;
            for r in [lo, hi] {
                if r != 0.0 {
                    boundary.push(frame.point(r, theta));
                }
            }
            interior.push(frame.point(0.5 * (lo + hi), theta));
        }
        if ia[i].1 < ib[j].1 {
            i += 1;
        } else {
            j += 1;
        }
    }
    OverlapMeasure { l: -total, boundary, interior }
}

/// `−μ(ray ∩ Λ_{εA}(A) ∩ Λ_{εB}(B))` and the endpoints of the intersection.
pub fn overlap_measure(
    a: &CMatrix,
    b: &CMatrix,
    eps_a: f64,
    eps_b: f64,
    frame: &SearchFrame,
    theta: f64,
) -> Result<OverlapMeasure> {
    let ca = imaginary_crossings(a, eps_a, frame, theta)?;
    let cb = imaginary_crossings(b, eps_b, frame, theta)?;
    Ok(overlap_from(&ca, &cb, frame, theta))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundaryGap {
    pub value: f64,
    pub clamped: bool,
    pub side: u8,
    pub index: u32,
}

fn gap_from(
    a: &CMatrix,
    b: &CMatrix,
    eps_a: f64,
    eps_b: f64,
    ca: &RayCrossings,
    cb: &RayCrossings,
    frame: &SearchFrame,
    theta: f64,
) -> Result<BoundaryGap> {
    if ca.radii.is_empty() || cb.radii.is_empty() {
        return Err(Error::Logic(format!(
            "boundary gap at theta = {theta} needs crossings for both matrices (got {} and {})",
            ca.radii.len(),
            cb.radii.len()
        )));
    }
    let mut cand: Vec<(f64, u8, u32)> = Vec::with_capacity(ca.radii.len() + cb.radii.len());
    // d^A: A's margin at B's boundary crossings.
    for (k, &r) in cb.radii.iter().enumerate() {
        cand.push((sigma_min_fast(a, frame.point(r, theta))? - eps_a, 0, k as u32));
    }
    for (k, &r) in ca.radii.iter().enumerate() {
        cand.push((sigma_min_fast(b, frame.point(r, theta))? - eps_b, 1, k as u32));
    }
    let min = cand.iter().fold(f64::INFINITY, |m, c| m.min(c.0));
    // Among candidates equal to rounding, report the first so the attaining
    // crossing does not flicker between numerically tied values.
    let tie = GAP_TIE_TOL * (1.0 + eps_a.max(eps_b));
    let first = cand.iter().find(|c| c.0 <= min + tie).copied().unwrap_or((min, 0, 0));
    let best = (min, first.1, first.2);
    let clamped = best.0 < 0.0;
    Ok(BoundaryGap { value: best.0.max(0.0), clamped, side: best.1, index: best.2 })
}

/// `d^AB(θ) = min(d^A, d^B)`: how far each matrix's boundary crossings are
/// from the other matrix's level set. Assumes the ray meets both
/// pseudospectra without interior overlap.
pub fn boundary_gap(
    a: &CMatrix,
    b: &CMatrix,
    eps_a: f64,
    eps_b: f64,
    frame: &SearchFrame,
    theta: f64,
) -> Result<BoundaryGap> {
    let ca = imaginary_crossings(a, eps_a, frame, theta)?;
    let cb = imaginary_crossings(b, eps_b, frame, theta)?;
    gap_from(a, b, eps_a, eps_b, &ca, &cb, frame, theta)
}

/// `d_ε(θ)` with a common `ε` for both matrices.
pub fn certificate_value(a: &CMatrix, b: &CMatrix, eps: f64, frame: &SearchFrame, theta: f64) -> Result<CertificateSample> {
    certificate_value_varah(a, b, eps, eps, frame, theta)
}

/// `d_{ε₁,ε₂}(θ)`: `ε₁` is used for `A` and `ε₂` for `B` throughout.
pub fn certificate_value_varah(
    a: &CMatrix,
    b: &CMatrix,
    eps1: f64,
    eps2: f64,
    frame: &SearchFrame,
    theta: f64,
) -> Result<CertificateSample> {
    let eigs_a = pencil_spectrum(a, eps1, frame, theta)?;
    let av = arg_min_sq_from(&eigs_a, frame.use_lines);
    let eigs_b = pencil_spectrum(b, eps2, frame, theta)?;
    let bv = arg_min_sq_from(&eigs_b, frame.use_lines);
    let mut signature = Signature { a_zero: av == 0.0, b_zero: bv == 0.0, ..Signature::default() };

    if av + bv > 0.0 {
        signature.branch = Some(Branch::Sum);
        return Ok(CertificateSample {
            theta,
            value: av + bv,
            branch: Branch::Sum,
            overlap_boundary: Vec::new(),
            overlap_interior: Vec::new(),
            clamped: false,
            signature,
        });
    }

    let ca = crossings_from(a, eps1, frame, theta, &eigs_a)?;
    let cb = crossings_from(b, eps2, frame, theta, &eigs_b)?;
    signature.crossings_a = ca.radii.len() as u32;
    signature.crossings_b = cb.radii.len() as u32;
    let ov = overlap_from(&ca, &cb, frame, theta);
    if ov.l < 0.0 {
        signature.branch = Some(Branch::Overlap);
        return Ok(CertificateSample {
            theta,
            value: ov.l,
            branch: Branch::Overlap,
            overlap_boundary: ov.boundary,
            overlap_interior: ov.interior,
            clamped: false,
            signature,
        });
    }

    let gap = gap_from(a, b, eps1, eps2, &ca, &cb, frame, theta)?;
    signature.branch = Some(Branch::Gap);
    signature.side = gap.side;
    signature.index = gap.index;
    Ok(CertificateSample {
        theta,
        value: gap.value,
        branch: Branch::Gap,
        overlap_boundary: Vec::new(),
        overlap_interior: Vec::new(),
        clamped: gap.clamped,
        signature,
    })
}
