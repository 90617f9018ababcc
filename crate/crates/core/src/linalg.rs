//! Dense complex kernels: smallest singular triplets, spectra, shifted operators.
//!
//! Matrices are stored row-major; decompositions are delegated to `faer`.

use faer::Mat;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Dense complex matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Complex64>,
}

impl CMatrix {
    /// Builds a matrix from row-major entries, rejecting empty shapes and
    /// non-finite values.
    pub fn new(rows: usize, cols: usize, entries: Vec<Complex64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Empty);
        }
        if entries.len() != rows * cols {
            return Err(Error::InvalidArgument(format!(
                "expected {} entries for a {rows}x{cols} matrix, got {}",
                rows * cols,
                entries.len()
            )));
        }
        let m = CMatrix { rows, cols, entries };
        m.check_finite()?;
        Ok(m)
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        CMatrix { rows, cols, entries }
    }

    pub fn zeros(n: usize) -> Self {
        Self::from_fn(n, n, |_, _| Complex64::new(0.0, 0.0))
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| Complex64::new(if i == j { 1.0 } else { 0.0 }, 0.0))
    }

    pub fn from_diagonal(diag: &[Complex64]) -> Self {
        let n = diag.len();
        Self::from_fn(n, n, |i, j| if i == j { diag[i] } else { Complex64::new(0.0, 0.0) })
    }

    /// Convenience constructor from real row slices.
    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        Self::from_fn(r, c, |i, j| Complex64::new(rows[i][j], 0.0))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Row-major entries.
    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: Complex64) {
        self.entries[i * self.cols + j] = value;
    }

    pub fn check_finite(&self) -> Result<()> {
        match self.entries.iter().position(|z| !(z.re.is_finite() && z.im.is_finite())) {
            Some(k) => Err(Error::NonFinite { row: k / self.cols, col: k % self.cols }),
            None => Ok(()),
        }
    }

    pub fn require_square(&self) -> Result<usize> {
        if self.is_square() {
            Ok(self.rows)
        } else {
            Err(Error::NotSquare { rows: self.rows, cols: self.cols })
        }
    }

    /// `M − zI`.
    pub fn shifted(&self, z: Complex64) -> Self {
        let mut out = self.clone();
        for i in 0..self.rows.min(self.cols) {
            out.entries[i * self.cols + i] -= z;
        }
        out
    }

    pub fn scaled(&self, s: Complex64) -> Self {
        CMatrix { rows: self.rows, cols: self.cols, entries: self.entries.iter().map(|&x| x * s).collect() }
    }

    pub fn conj_transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).conj())
    }

    pub fn mul_vec(&self, x: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(x.len(), self.cols);
        (0..self.rows)
            .map(|i| self.entries[i * self.cols..(i + 1) * self.cols].iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn matmul(&self, other: &CMatrix) -> Self {
        assert_eq!(self.cols, other.rows);
        Self::from_fn(self.rows, other.cols, |i, j| (0..self.cols).map(|k| self.get(i, k) * other.get(k, j)).sum())
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn to_faer(&self) -> Mat<Complex64> {
        Mat::from_fn(self.rows, self.cols, |i, j| self.get(i, j))
    }
}

/// Smallest singular value with a consistent pair of unit singular vectors:
/// `M v = σ u`, `Mᴴ u = σ v`.
#[derive(Clone, Debug)]
pub struct SingularTriplet {
    pub sigma: f64,
    pub left_vector: Vec<Complex64>,
    pub right_vector: Vec<Complex64>,
}

pub fn smallest_singular_triplet(m: &CMatrix) -> Result<SingularTriplet> {
    let n = m.require_square()?;
    let svd = m.to_faer().svd().map_err(|_| Error::Svd { dim: n })?;
    let s = svd.S().column_vector();
    // faer orders singular values non-increasingly.
    let last = n - 1;
    let sigma = s[last].re.max(0.0);
    let u = svd.U();
    let v = svd.V();
    Ok(SingularTriplet {
        sigma,
        left_vector: (0..n).map(|i| u[(i, last)]).collect(),
        right_vector: (0..n).map(|i| v[(i, last)]).collect(),
    })
}

/// All singular values, non-increasing.
pub fn singular_values(m: &CMatrix) -> Result<Vec<f64>> {
    let n = m.require_square()?;
    m.to_faer().singular_values().map_err(|_| Error::Svd { dim: n })
}

/// All eigenvalues with multiplicity, unordered.
pub fn eigenvalues(m: &CMatrix) -> Result<Vec<Complex64>> {
    let n = m.require_square()?;
    if n == 1 {
        return Ok(vec![m.get(0, 0)]);
    }
    m.to_faer().eigenvalues().map_err(|_| Error::Eigen { dim: n })
}

/// `σ_min(M − zI)`.
pub fn sigma_min_shifted(m: &CMatrix, z: Complex64) -> Result<f64> {
    Ok(smallest_singular_triplet(&m.shifted(z))?.sigma)
}

/// `σ_min(M − zI)` from a values-only decomposition. Cheaper than
/// [`sigma_min_shifted`] but may differ from it in the last few bits.
pub fn sigma_min_fast(m: &CMatrix, z: Complex64) -> Result<f64> {
    let shifted = m.shifted(z);
    let n = shifted.require_square()?;
    if n == 1 {
        return Ok(shifted.get(0, 0).norm());
    }
    Ok(singular_values(&shifted)?[n - 1].max(0.0))
}

/// Singular triplet of `M − zI`.
pub fn smallest_singular_triplet_shifted(m: &CMatrix, z: Complex64) -> Result<SingularTriplet> {
    smallest_singular_triplet(&m.shifted(z))
}

/// Largest singular value.
pub fn spectral_norm(m: &CMatrix) -> Result<f64> {
    Ok(singular_values(m)?.first().copied().unwrap_or(0.0))
}

pub(crate) fn inner(u: &[Complex64], v: &[Complex64]) -> Complex64 {
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}
