//! The objectives `f^D(z) = max(σ_A, σ_B)` and `f^V(z) = σ_A + σ_B`, with
//! `σ_M = σ_min(M − zI)`, and a BFGS local minimizer that tolerates kinks.
//!
//! The gradient of `σ_min(M − zI)` with respect to `z = x + iy` follows from
//! its singular triplet `(σ, u, v)`: `∂σ/∂x = −Re(uᴴv)` and
//! `∂σ/∂y = Im(uᴴv)`.

use num_complex::Complex64;

use crate::error::Result;
use crate::linalg::{inner, smallest_singular_triplet_shifted, CMatrix};

/// Relative gap below which the two singular values count as tied.
pub const TIE_TOL: f64 = 1e-14;
/// Relative gap below which both branch gradients enter the stationarity test.
const NEAR_TIE: f64 = 1e-8;
pub const MAX_ITERATIONS: usize = 500;
const ARMIJO: f64 = 1e-4;
const WOLFE: f64 = 0.9;
const LINE_SEARCH_STEPS: usize = 60;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Variant {
    Demmel,
    Varah,
}

impl Variant {
    pub fn as_str(self) -> &'static str {
        match self {
            Variant::Demmel => "demmel",
            Variant::Varah => "varah",
        }
    }
}

impl std::str::FromStr for Variant {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "demmel" => Ok(Variant::Demmel),
            "varah" => Ok(Variant::Varah),
            other => Err(format!("unknown variant '{other}' (expected demmel or varah)")),
        }
    }
}

/// Which singular value attains the max in `f^D`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Active {
    A,
    B,
    Tie,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ObjectiveEval {
    pub value: f64,
    /// `(∂f/∂x, ∂f/∂y)` of the attaining branch (the `A` branch on a tie).
    pub gradient: [f64; 2],
    pub active: Active,
    pub sigma_a: f64,
    pub sigma_b: f64,
    pub grad_a: [f64; 2],
    pub grad_b: [f64; 2],
}

fn sigma_and_gradient(m: &CMatrix, z: Complex64) -> Result<(f64, [f64; 2])> {
    let t = smallest_singular_triplet_shifted(m, z)?;
    let w = inner(&t.left_vector, &t.right_vector);
    Ok((t.sigma, [-w.re, w.im]))
}

pub fn eval_objective(a: &CMatrix, b: &CMatrix, z: Complex64, variant: Variant) -> Result<ObjectiveEval> {
    let (sa, ga) = sigma_and_gradient(a, z)?;
    let (sb, gb) = sigma_and_gradient(b, z)?;
    Ok(match variant {
        Variant::Demmel => {
            let active = if (sa - sb).abs() <= TIE_TOL * sa.max(sb) {
                Active::Tie
            } else if sa > sb {
                Active::A
            } else {
                Active::B
            };
            let gradient = if active == Active::B { gb } else { ga };
            ObjectiveEval { value: sa.max(sb), gradient, active, sigma_a: sa, sigma_b: sb, grad_a: ga, grad_b: gb }
        }
        Variant::Varah => ObjectiveEval {
            value: sa + sb,
            gradient: [ga[0] + gb[0], ga[1] + gb[1]],
            active: Active::Tie,
            sigma_a: sa,
            sigma_b: sb,
            grad_a: ga,
            grad_b: gb,
        },
    })
}

/// Objective value only.
pub fn objective_value(a: &CMatrix, b: &CMatrix, z: Complex64, variant: Variant) -> Result<f64> {
    Ok(eval_objective(a, b, z, variant)?.value)
}

#[derive(Clone, Debug, PartialEq)]
pub struct LocalMinResult {
    pub z_star: Complex64,
    pub value: f64,
    pub iterations: usize,
    /// Stationarity reached, or the line search could not decrease further
    /// (the normal outcome at a nonsmooth minimizer).
    pub converged: bool,
    pub objective_evals: usize,
    /// Accepted objective values, starting with `f(z_init)`.
    pub trace: Vec<f64>,
}

fn dot(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

fn norm(a: [f64; 2]) -> f64 {
    dot(a, a).sqrt()
}

/// Smallest-norm point of the segment between two vectors.
fn min_norm_combination(g1: [f64; 2], g2: [f64; 2]) -> [f64; 2] {
    let d = [g1[0] - g2[0], g1[1] - g2[1]];
    let dd = dot(d, d);
    if dd == 0.0 {
        return g1;
    }
    let t = (dot(g1, d) / dd).clamp(0.0, 1.0);
    [g1[0] - t * d[0], g1[1] - t * d[1]]
}

fn stationarity(e: &ObjectiveEval, variant: Variant) -> f64 {
    match variant {
        Variant::Demmel if (e.sigma_a - e.sigma_b).abs() <= NEAR_TIE * e.value.max(1.0) => {
            norm(min_norm_combination(e.grad_a, e.grad_b))
        }
        _ => norm(e.gradient),
    }
}

struct Counter<'m> {
    a: &'m CMatrix,
    b: &'m CMatrix,
    variant: Variant,
    evals: usize,
}

impl Counter<'_> {
    fn eval(&mut self, z: Complex64) -> Result<ObjectiveEval> {
        self.evals += 1;
        eval_objective(self.a, self.b, z, self.variant)
    }
}

enum Search {
    Wolfe(f64, ObjectiveEval),
    /// Only sufficient decrease was achieved.
    Armijo(f64, ObjectiveEval),
    Failed,
}

/// Weak Wolfe bracketing line search along `d` from `z`.
fn line_search(c: &mut Counter<'_>, z: Complex64, cur: &ObjectiveEval, d: [f64; 2]) -> Result<Search> {
    let slope = dot(cur.gradient, d);
    if !(slope < 0.0) {
        return Ok(Search::Failed);
    }
    let (mut lo, mut hi) = (0.0f64, f64::INFINITY);
    let mut t = 1.0;
    let mut armijo: Option<(f64, ObjectiveEval)> = None;
    for _ in 0..LINE_SEARCH_STEPS {
        let zt = z + Complex64::new(t * d[0], t * d[1]);
        let e = c.eval(zt)?;
        if !(e.value <= cur.value + ARMIJO * t * slope) || !e.value.is_finite() {
            hi = t;
        } else {
            if armijo.as_ref().is_none_or(|(_, best)| e.value < best.value) {
                armijo = Some((t, e));
            }
            if dot(e.gradient, d) < WOLFE * slope {
                lo = t;
            } else {
                return Ok(Search::Wolfe(t, e));
            }
        }
        t = if hi.is_finite() { 0.5 * (lo + hi) } else { 2.0 * lo.max(t) };
        if hi.is_finite() && hi - lo <= 1e-16 * hi.max(1.0) {
            break;
        }
    }
    Ok(match armijo {
        Some((t, e)) if e.value < cur.value => Search::Armijo(t, e),
        _ => Search::Failed,
    })
}

/// BFGS descent on `f(x + iy)` from `z_init`.
pub fn minimize_local(a: &CMatrix, b: &CMatrix, z_init: Complex64, variant: Variant, opt_tol: f64) -> Result<LocalMinResult> {
    let mut c = Counter { a, b, variant, evals: 0 };
    let mut z = z_init;
    let mut cur = c.eval(z)?;
    let mut trace = vec![cur.value];
    // Inverse Hessian approximation, row-major 2×2.
    let mut h = [1.0, 0.0, 0.0, 1.0];
    let mut fresh = true;
    let mut converged = false;
    let mut iterations = 0;

    while iterations < MAX_ITERATIONS {
        if stationarity(&cur, variant) <= opt_tol || cur.value == 0.0 {
            converged = true;
            break;
        }
        let g = cur.gradient;
        let d = [-(h[0] * g[0] + h[1] * g[1]), -(h[2] * g[0] + h[3] * g[1])];
        let step = line_search(&mut c, z, &cur, d)?;
        let (t, next, wolfe) = match step {
            Search::Wolfe(t, e) => (t, e, true),
            Search::Armijo(t, e) => (t, e, false),
            Search::Failed => {
                if fresh {
                    converged = true;
                    break;
                }
                h = [1.0, 0.0, 0.0, 1.0];
                fresh = true;
                continue;
            }
        };
        iterations += 1;
        let s = [t * d[0], t * d[1]];
        let y = [next.gradient[0] - g[0], next.gradient[1] - g[1]];
        z += Complex64::new(s[0], s[1]);
        cur = next;
        trace.push(cur.value);
        let sy = dot(s, y);
        if wolfe && sy > 0.0 {
            let rho = 1.0 / sy;
            // H ← (I − ρ s yᵀ) H (I − ρ y sᵀ) + ρ s sᵀ
            let v = [1.0 - rho * s[0] * y[0], -rho * s[0] * y[1], -rho * s[1] * y[0], 1.0 - rho * s[1] * y[1]];
            let vh = mul(v, h);
            let vt = [v[0], v[2], v[1], v[3]];
            let mut nh = mul(vh, vt);
            nh[0] += rho * s[0] * s[0];
            nh[1] += rho * s[0] * s[1];
            nh[2] += rho * s[1] * s[0];
            nh[3] += rho * s[1] * s[1];
            if nh.iter().all(|x| x.is_finite()) {
                h = nh;
                fresh = false;
            }
        } else if !wolfe {
            h = [1.0, 0.0, 0.0, 1.0];
            fresh = true;
        }
    }

    Ok(LocalMinResult { z_star: z, value: cur.value, iterations, converged, objective_evals: c.evals, trace })
}

fn mul(p: [f64; 4], q: [f64; 4]) -> [f64; 4] {
    [
        p[0] * q[0] + p[1] * q[2],
        p[0] * q[1] + p[1] * q[3],
        p[2] * q[0] + p[3] * q[2],
        p[2] * q[1] + p[3] * q[3],
    ]
}
