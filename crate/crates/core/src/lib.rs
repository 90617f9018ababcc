//! Computes the eigenvalue separation `sep_λ(A, B)`: the smallest perturbation
//! size for which two square complex matrices share an eigenvalue.
//!
//! Demmel's variant bounds `max(‖E‖, ‖F‖)` and equals the smallest `ε` at which
//! the `ε`-pseudospectra of `A` and `B` intersect. It is computed by local
//! nonsmooth minimization of `f(z) = max(σ_min(A − zI), σ_min(B − zI))`,
//! restarted whenever an angular certificate function built around a search
//! point reveals interior overlap of the two pseudospectra. When the
//! certificate has no negative values, the incumbent is globally optimal.
//!
//! Varah's variant (bound on `‖E‖ + ‖F‖`) is estimated from above, with the
//! guarantee that the interiors of the two pseudospectra at the returned split
//! `ε₁ + ε₂` do not overlap.
//!
//! ```no_run
//! use seplam_core::{compute_sep_demmel, CMatrix, SolveOptions};
//! use num_complex::Complex64;
//!
//! let a = CMatrix::from_diagonal(&[Complex64::new(0.0, 0.0)]);
//! let b = CMatrix::from_diagonal(&[Complex64::new(2.0, 0.0)]);
//! let result = compute_sep_demmel(&a, &b, &SolveOptions::default()).unwrap();
//! assert!((result.epsilon - 1.0).abs() < 1e-8);
//! ```

pub mod driver;
pub mod interp;
pub mod linalg;
pub mod objective;
#[cfg(any(test, feature = "oracle"))]
pub mod oracle;
pub mod parallel;
pub mod ray_certificate;

mod error;

pub use driver::{
    compute_sep, compute_sep_demmel, estimate_sep_varah, select_search_point,
    validate_search_point, varah_eigenvalue_check, RoundRecord, SepResult, SolveOptions,
    Status,
};
pub use error::{Error, Result};
pub use interp::{FitOptions, FitOutcome, PiecewiseInterpolant};
pub use linalg::{CMatrix, SingularTriplet};
pub use num_complex::Complex64;
pub use objective::{Active, LocalMinResult, ObjectiveEval, Variant};
pub use ray_certificate::{Branch, CertificateSample, RayCrossings, SearchFrame};
