//! Dense linear algebra kernels.
//!
//! [`DenseMatrix`] is the carrier for every matrix in the crate: data sets,
//! bases, measurement matrices and measurements. Storage is column-major.
//! The pivoted QR used for sensor selection lives in [`qr`]; SVD-based
//! routines (pseudoinverse solves, condition numbers) live in [`svd`]; seeded
//! random matrices live in [`random`].

pub mod qr;
pub mod random;
pub mod svd;

use std::fmt;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

pub use qr::{cpqr, cpqr_factorize, CpqrFactorization, PivotResult};
pub use random::{gaussian_matrix, random_orthogonal, random_orthonormal_columns};
pub use svd::{condition_number, lstsq_minnorm, singular_values, svd, truncation_threshold, Svd};

/// Real matrix with explicit shape, stored column-major.
///
/// Both dimensions are at least one and every entry is finite.
#[derive(Clone, PartialEq)]
pub struct DenseMatrix {
    inner: DMatrix<f64>,
}

impl DenseMatrix {
    /// Builds a matrix from column-major data.
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::arg(format!(
                "matrix dimensions must be positive, got {rows}x{cols}"
            )));
        }
        if data.len() != rows * cols {
            return Err(Error::arg(format!(
                "data length {} does not match {rows}x{cols}",
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::arg(format!(
                "non-finite entry at ({}, {})",
                pos % rows,
                pos / rows
            )));
        }
        Ok(Self {
            inner: DMatrix::from_vec(rows, cols, data),
        })
    }

    /// Builds a matrix from row slices; convenient for literals.
    pub fn from_rows(rows: &[&[f64]]) -> Result<Self> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.len());
        if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != ncols) {
            return Err(Error::arg(format!(
                "row {i} has {} entries, expected {ncols}",
                r.len()
            )));
        }
        let mut data = Vec::with_capacity(nrows * ncols);
        for j in 0..ncols {
            data.extend(rows.iter().map(|r| r[j]));
        }
        Self::new(nrows, ncols, data)
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let mut data = Vec::with_capacity(rows * cols);
        for j in 0..cols {
            for i in 0..rows {
                data.push(f(i, j));
            }
        }
        Self::new(rows, cols, data)
    }

    pub fn zeros(rows: usize, cols: usize) -> Result<Self> {
        Self::new(rows, cols, vec![0.0; rows * cols])
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::from_fn(n, n, |i, j| if i == j { 1.0 } else { 0.0 })
    }

    /// Square diagonal matrix.
    pub fn from_diagonal(diag: &[f64]) -> Result<Self> {
        let n = diag.len();
        Self::from_fn(n, n, |i, j| if i == j { diag[i] } else { 0.0 })
    }

    /// Wraps a matrix produced by an internal kernel. Callers guarantee
    /// positive dimensions; finiteness is checked in debug builds.
    pub(crate) fn from_nalgebra(inner: DMatrix<f64>) -> Self {
        debug_assert!(inner.nrows() > 0 && inner.ncols() > 0);
        debug_assert!(inner.iter().all(|v| v.is_finite()));
        Self { inner }
    }

    pub(crate) fn as_nalgebra(&self) -> &DMatrix<f64> {
        &self.inner
    }

    pub fn rows(&self) -> usize {
        self.inner.nrows()
    }

    pub fn cols(&self) -> usize {
        self.inner.ncols()
    }

    pub fn shape(&self) -> (usize, usize) {
        self.inner.shape()
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.inner[(row, col)]
    }

    /// Column-major view of all entries.
    pub fn as_slice(&self) -> &[f64] {
        self.inner.as_slice()
    }

    pub fn column(&self, col: usize) -> &[f64] {
        let r = self.rows();
        &self.inner.as_slice()[col * r..(col + 1) * r]
    }

    pub fn row(&self, row: usize) -> Vec<f64> {
        (0..self.cols()).map(|j| self.inner[(row, j)]).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_nalgebra(self.inner.transpose())
    }

    pub fn matmul(&self, rhs: &DenseMatrix) -> Result<Self> {
        if self.cols() != rhs.rows() {
            return Err(Error::arg(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows(),
                self.cols(),
                rhs.rows(),
                rhs.cols()
            )));
        }
        Ok(Self::from_nalgebra(&self.inner * &rhs.inner))
    }

    /// `self - rhs`, entrywise.
    pub fn sub(&self, rhs: &DenseMatrix) -> Result<Self> {
        if self.shape() != rhs.shape() {
            return Err(Error::arg(format!(
                "shape mismatch {:?} vs {:?}",
                self.shape(),
                rhs.shape()
            )));
        }
        Ok(Self::from_nalgebra(&self.inner - &rhs.inner))
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self::from_nalgebra(&self.inner * factor)
    }

    /// Gathers the given rows, in order.
    pub fn select_rows(&self, rows: &[usize]) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::arg("row selection is empty"));
        }
        if let Some(&bad) = rows.iter().find(|&&i| i >= self.rows()) {
            return Err(Error::arg(format!(
                "row index {bad} out of range for {} rows",
                self.rows()
            )));
        }
        Ok(Self::from_nalgebra(self.inner.select_rows(rows)))
    }

    pub fn select_columns(&self, cols: &[usize]) -> Result<Self> {
        if cols.is_empty() {
            return Err(Error::arg("column selection is empty"));
        }
        if let Some(&bad) = cols.iter().find(|&&j| j >= self.cols()) {
            return Err(Error::arg(format!(
                "column index {bad} out of range for {} columns",
                self.cols()
            )));
        }
        Ok(Self::from_nalgebra(self.inner.select_columns(cols)))
    }

    /// The first `k` columns.
    pub fn leading_columns(&self, k: usize) -> Result<Self> {
        if k == 0 || k > self.cols() {
            return Err(Error::arg(format!(
                "cannot take {k} leading columns of a matrix with {}",
                self.cols()
            )));
        }
        Ok(Self::from_nalgebra(self.inner.columns(0, k).into_owned()))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.inner.norm()
    }

    pub fn max_abs(&self) -> f64 {
        self.inner.amax()
    }
}

impl fmt::Debug for DenseMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DenseMatrix {}x{} ", self.rows(), self.cols())?;
        if self.rows() * self.cols() <= 64 {
            write!(f, "{}", self.inner)
        } else {
            write!(f, "[..]")
        }
    }
}
