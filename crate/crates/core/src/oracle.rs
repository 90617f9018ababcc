//! Brute-force references for tests: grid search over `f`, closed forms for
//! normal matrices, and uniform angular scans of the certificate.
//!
//! Compiled only for tests or with the `oracle` feature.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{eigenvalues, sigma_min_fast, CMatrix};
use crate::objective::Variant;
use crate::ray_certificate::{certificate_value_varah, CertificateSample, SearchFrame};

/// A square grid of `points_per_axis²` points, re-centred on the incumbent
/// and shrunk by `zoom_factor` for each of `zoom_rounds` refinements.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec {
    pub center: Complex64,
    pub half_width: f64,
    pub points_per_axis: usize,
    pub zoom_rounds: usize,
    pub zoom_factor: f64,
}

fn hermitian_extent(m: &CMatrix, rotate: Complex64) -> Result<(f64, f64)> {
    // Eigenvalues of the Hermitian part of rotate·M bound the numerical range
    // of M along the corresponding direction.
    let n = m.rows();
    let r = m.scaled(rotate);
    let h = CMatrix::from_fn(n, n, |i, j| 0.5 * (r.get(i, j) + r.get(j, i).conj()));
    let ev = h.to_faer().self_adjoint_eigenvalues(faer::Side::Lower).map_err(|_| Error::Eigen { dim: n })?;
    let lo = ev.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = ev.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    Ok((lo, hi))
}

/// Bounding box `[x0, x1] × [y0, y1]` of the numerical range.
fn numerical_range_box(m: &CMatrix) -> Result<[f64; 4]> {
    let (x0, x1) = hermitian_extent(m, Complex64::new(1.0, 0.0))?;
    // Re(−i z) = Im z.
    let (y0, y1) = hermitian_extent(m, Complex64::new(0.0, -1.0))?;
    Ok([x0, x1, y0, y1])
}

fn objective(a: &CMatrix, b: &CMatrix, z: Complex64, variant: Variant) -> Result<f64> {
    let sa = sigma_min_fast(a, z)?;
    let sb = sigma_min_fast(b, z)?;
    Ok(match variant {
        Variant::Demmel => sa.max(sb),
        Variant::Varah => sa + sb,
    })
}

impl GridSpec {
    /// A grid guaranteed to contain every global minimizer.
    ///
    /// `σ_min(M − zI)` is at least the distance from `z` to the numerical
    /// range of `M`, so a minimizer with value `f*` lies within `f*` of both
    /// numerical ranges. Any evaluation of `f` bounds `f*` from above.
    pub fn covering(a: &CMatrix, b: &CMatrix, variant: Variant, points_per_axis: usize, zoom_rounds: usize, zoom_factor: f64) -> Result<Self> {
        let ba = numerical_range_box(a)?;
        let bb = numerical_range_box(b)?;
        let mid = |bx: [f64; 4]| Complex64::new(0.5 * (bx[0] + bx[1]), 0.5 * (bx[2] + bx[3]));
        let probe = 0.5 * (mid(ba) + mid(bb));
        let pad = objective(a, b, probe, variant)?;
        let x0 = ba[0].max(bb[0]) - pad;
        let x1 = ba[1].min(bb[1]) + pad;
        let y0 = ba[2].max(bb[2]) - pad;
        let y1 = ba[3].min(bb[3]) + pad;
        let half_width = 0.5 * (x1 - x0).max(y1 - y0).max(1e-12);
        Ok(GridSpec {
            center: Complex64::new(0.5 * (x0 + x1), 0.5 * (y0 + y1)),
            half_width,
            points_per_axis,
            zoom_rounds,
            zoom_factor,
        })
    }
}

fn grid_pass(a: &CMatrix, b: &CMatrix, variant: Variant, center: Complex64, half: f64, p: usize, best: &mut (Complex64, f64)) -> Result<()> {
    let h = 2.0 * half / (p - 1) as f64;
    let at = |j: usize, k: usize| center + Complex64::new(-half + h * j as f64, -half + h * k as f64);
    // Every grid point is evaluated unless a Lipschitz bound from a coarser
    // pass proves it cannot beat the incumbent, so the result equals that of
    // an exhaustive scan.
    let lip = match variant {
        Variant::Demmel => 1.0,
        Variant::Varah => 2.0,
    };
    let stride = 8usize.min(p - 1);
    let coarse: Vec<usize> = (0..p).step_by(stride).chain(((p - 1) % stride != 0).then_some(p - 1)).collect();
    let nc = coarse.len();
    let cv = (0..nc * nc)
        .into_par_iter()
        .map(|q| objective(a, b, at(coarse[q / nc], coarse[q % nc]), variant))
        .collect::<Result<Vec<f64>>>()?;
    for (q, &v) in cv.iter().enumerate() {
        if v < best.1 {
            *best = (at(coarse[q / nc], coarse[q % nc]), v);
        }
    }
    let mut cells: Vec<(f64, usize, usize)> = Vec::new();
    for cj in 0..nc - 1 {
        for ck in 0..nc - 1 {
            let corners = [cv[cj * nc + ck], cv[(cj + 1) * nc + ck], cv[cj * nc + ck + 1], cv[(cj + 1) * nc + ck + 1]];
            let w = h * (coarse[cj + 1] - coarse[cj]).max(coarse[ck + 1] - coarse[ck]) as f64;
            let lb = corners.iter().cloned().fold(f64::INFINITY, f64::min) - lip * w * std::f64::consts::FRAC_1_SQRT_2;
            cells.push((lb, cj, ck));
        }
    }
    cells.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)).then(x.2.cmp(&y.2)));
    // Cells are scanned in batches; merging the batch results in cell order
    // keeps the outcome independent of the thread count.
    for batch in cells.chunks(64) {
        let live: Vec<&(f64, usize, usize)> = batch.iter().filter(|c| c.0 < best.1).collect();
        if live.is_empty() {
            break;
        }
        let found = live
            .par_iter()
            .map(|&&(_, cj, ck)| {
                let mut local = (Complex64::new(0.0, 0.0), f64::INFINITY);
                for j in coarse[cj]..=coarse[cj + 1] {
                    for k in coarse[ck]..=coarse[ck + 1] {
                        let z = at(j, k);
                        let v = objective(a, b, z, variant)?;
                        if v < local.1 {
                            local = (z, v);
                        }
                    }
                }
                Ok(local)
            })
            .collect::<Result<Vec<_>>>()?;
        for local in found {
            if local.1 < best.1 {
                *best = local;
            }
        }
    }
    Ok(())
}

/// Minimum of `f` over the grid and its zoomed refinements.
pub fn grid_min(a: &CMatrix, b: &CMatrix, variant: Variant, spec: &GridSpec) -> Result<(Complex64, f64)> {
    if spec.points_per_axis < 16 || !(spec.zoom_factor > 1.0) {
        return Err(Error::InvalidArgument("grid needs at least 16 points per axis and a zoom factor above 1".into()));
    }
    let mut best = (spec.center, f64::INFINITY);
    grid_pass(a, b, variant, spec.center, spec.half_width, spec.points_per_axis, &mut best)?;
    let mut half = spec.half_width;
    for _ in 0..spec.zoom_rounds {
        half /= spec.zoom_factor;
        let c = best.0;
        grid_pass(a, b, variant, c, half, spec.points_per_axis, &mut best)?;
    }
    Ok(best)
}

/// Separation of normal matrices from their spectra: half the smallest
/// inter-spectral distance for Demmel's variant, the full distance for Varah's.
pub fn normal_sep(eigs_a: &[Complex64], eigs_b: &[Complex64], variant: Variant) -> f64 {
    let mut d = f64::INFINITY;
    for la in eigs_a {
        for lb in eigs_b {
            d = d.min((la - lb).norm());
        }
    }
    match variant {
        Variant::Demmel => 0.5 * d,
        Variant::Varah => d,
    }
}

/// Spectra of a pair, for feeding [`normal_sep`].
pub fn spectra(a: &CMatrix, b: &CMatrix) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
    Ok((eigenvalues(a)?, eigenvalues(b)?))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ScanEps {
    Common(f64),
    Split(f64, f64),
}

#[derive(Clone, Debug)]
pub struct ThetaScan {
    pub min_theta: f64,
    pub min_value: f64,
    pub samples: Vec<CertificateSample>,
}

/// The certificate at `n_points` uniformly spaced angles.
pub fn theta_scan(a: &CMatrix, b: &CMatrix, eps: ScanEps, frame: &SearchFrame, n_points: usize) -> Result<ThetaScan> {
    if n_points < 256 {
        return Err(Error::InvalidArgument(format!("theta scan needs at least 256 points, got {n_points}")));
    }
    let (e1, e2) = match eps {
        ScanEps::Common(e) => (e, e),
        ScanEps::Split(x, y) => (x, y),
    };
    let (lo, hi) = frame.domain();
    // Rays: (−π, π] without the duplicate endpoint; lines: closed [0, π].
    let samples = (0..n_points)
        .into_par_iter()
        .map(|j| {
            let t = if frame.use_lines {
                lo + (hi - lo) * j as f64 / (n_points - 1) as f64
            } else {
                lo + (hi - lo) * (j + 1) as f64 / n_points as f64
            };
            certificate_value_varah(a, b, e1, e2, frame, t)
        })
        .collect::<Result<Vec<_>>>()?;
    let best = samples.iter().min_by(|x, y| x.value.total_cmp(&y.value)).expect("nonempty scan");
    Ok(ThetaScan { min_theta: best.theta, min_value: best.value, samples })
}

/// Eigenvalues of the pencil `(C, D_θ)` with
/// `C = [[M − z0 I, −ε I], [ε I, −(M − z0 I)ᴴ]]` and
/// `D_θ = diag(−i e^{iθ} I, i e^{−iθ} I)`, from a QZ factorization. The
/// certificate works with the equivalent single matrix `D_θ⁻¹ C`; this is the
/// unreduced form for cross-checking it. Infinite eigenvalues cannot occur
/// since `D_θ` is unitary.
pub fn pencil_form_spectrum(m: &CMatrix, eps: f64, z0: Complex64, theta: f64) -> Result<Vec<Complex64>> {
    let k = m.rows();
    let zero = Complex64::new(0.0, 0.0);
    let s = m.shifted(z0);
    let c = CMatrix::from_fn(2 * k, 2 * k, |r, col| match (r < k, col < k) {
        (true, true) => s.get(r, col),
        (true, false) if r == col - k => Complex64::new(-eps, 0.0),
        (false, true) if r - k == col => Complex64::new(eps, 0.0),
        (false, false) => -s.get(col - k, r - k).conj(),
        _ => zero,
    });
    let i = Complex64::new(0.0, 1.0);
    let d = CMatrix::from_fn(2 * k, 2 * k, |r, col| match (r == col, r < k) {
        (true, true) => -i * Complex64::from_polar(1.0, theta),
        (true, false) => i * Complex64::from_polar(1.0, -theta),
        _ => zero,
    });
    let g = c.to_faer().generalized_eigen(d.to_faer()).map_err(|_| Error::Eigen { dim: 2 * k })?;
    let (sa, sb) = (g.S_a().column_vector(), g.S_b().column_vector());
    Ok((0..2 * k).map(|j| sa[j] / sb[j]).collect())
}

/// Seeded test problems.
#[cfg(feature = "oracle")]
pub mod problems {
    use num_complex::Complex64;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    use crate::error::Result;
    use crate::linalg::{eigenvalues, CMatrix};

    pub fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    /// Entries with independent standard normal real and imaginary parts.
    pub fn complex_normal(n: usize, rng: &mut impl Rng) -> CMatrix {
        CMatrix::from_fn(n, n, |_, _| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
    }

    pub fn spectral_radius(m: &CMatrix) -> Result<f64> {
        Ok(eigenvalues(m)?.iter().map(|l| l.norm()).fold(0.0, f64::max))
    }

    /// `m` scaled so that its spectral radius is `radius`.
    pub fn with_spectral_radius(m: &CMatrix, radius: f64) -> Result<CMatrix> {
        let r = spectral_radius(m)?;
        Ok(m.scaled(Complex64::new(radius / r, 0.0)))
    }

    /// Two independent complex normal `n × n` matrices rescaled to spectral
    /// radius 10, then shifted to `A − sI` and `B + sI`.
    pub fn shifted_pair(n: usize, s: f64, seed: u64) -> Result<(CMatrix, CMatrix)> {
        let mut g = rng(seed);
        let a = with_spectral_radius(&complex_normal(n, &mut g), 10.0)?;
        let b = with_spectral_radius(&complex_normal(n, &mut g), 10.0)?;
        let shift = Complex64::new(s, 0.0);
        Ok((a.shifted(shift), b.shifted(-shift)))
    }

    /// Diagonal matrices with entries uniform in the square `[−w, w]²`.
    pub fn diagonal_pair(na: usize, nb: usize, width: f64, rng: &mut impl Rng) -> (CMatrix, CMatrix) {
        let mut draw = |k: usize| (0..k).map(|_| Complex64::new(rng.gen_range(-width..width), rng.gen_range(-width..width))).collect::<Vec<_>>();
        let da = draw(na);
        let db = draw(nb);
        (CMatrix::from_diagonal(&da), CMatrix::from_diagonal(&db))
    }
}
