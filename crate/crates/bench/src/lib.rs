//! Problem instances shared by the benchmarks.

use seplam_core::oracle::problems::shifted_pair;
use seplam_core::{select_search_point, CMatrix, Complex64, Result, SearchFrame, SolveOptions};

/// A seeded dense pair of size `n`, both factors scaled to spectral radius
/// 10, with the spectra pushed apart by `n`.
pub struct Instance {
    pub a: CMatrix,
    pub b: CMatrix,
    pub frame: SearchFrame,
}

impl Instance {
    pub fn new(n: usize, seed: u64) -> Result<Self> {
        let (a, b) = shifted_pair(n, n as f64, seed)?;
        let frame = SearchFrame::lines(select_search_point(&a, &b)?);
        Ok(Instance { a, b, frame })
    }

    /// A point between the two spectra, away from either.
    pub fn probe_point(&self) -> Complex64 {
        self.frame.z0 + Complex64::new(0.25, 0.5)
    }
}

/// Single-threaded defaults, so timings do not depend on the machine's cores.
pub fn sequential() -> SolveOptions {
    SolveOptions { threads: Some(1), ..SolveOptions::default() }
}
