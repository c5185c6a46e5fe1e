//! Singular value decomposition and the solvers built on it.
//!
//! The decomposition itself is nalgebra's Golub–Kahan bidiagonalization with
//! implicit QR sweeps; everything here only relies on its contract
//! (`A = U diag(S) V^T`, orthonormal factors, `S` non-increasing).

use nalgebra::DMatrix;

use crate::error::{Error, Result};

use super::DenseMatrix;

/// Thin SVD `A = U diag(S) V^T` with `k = min(rows, cols)` components.
#[derive(Debug, Clone)]
pub struct Svd {
    /// `rows x k`, orthonormal columns.
    pub u: DenseMatrix,
    /// Non-increasing, non-negative.
    pub s: Vec<f64>,
    /// `cols x k`, orthonormal columns.
    pub v: DenseMatrix,
}

impl Svd {
    /// `U diag(S) V^T`.
    pub fn recompose(&self) -> DenseMatrix {
        let mut us = self.u.as_nalgebra().clone();
        for (j, &s) in self.s.iter().enumerate() {
            us.column_mut(j).scale_mut(s);
        }
        DenseMatrix::from_nalgebra(us * self.v.as_nalgebra().transpose())
    }
}

pub fn svd(a: &DenseMatrix) -> Svd {
    let dec = a.as_nalgebra().clone().svd(true, true);
    let u = dec.u.expect("requested U");
    let v_t = dec.v_t.expect("requested V^T");
    Svd {
        u: DenseMatrix::from_nalgebra(u),
        s: dec.singular_values.iter().copied().collect(),
        v: DenseMatrix::from_nalgebra(v_t.transpose()),
    }
}

/// Singular values only, non-increasing. Skips forming `U` and `V`.
pub fn singular_values(a: &DenseMatrix) -> Vec<f64> {
    let mut s: Vec<f64> = a
        .as_nalgebra()
        .clone()
        .svd_unordered(false, false)
        .singular_values
        .iter()
        .copied()
        .collect();
    s.sort_unstable_by(|x, y| y.total_cmp(x));
    s
}

/// Smallest singular value of a matrix with at least as many rows as columns.
pub(crate) fn smallest_singular_value(a: &DMatrix<f64>) -> f64 {
    a.clone()
        .svd_unordered(false, false)
        .singular_values
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

/// Rank cutoff `max(rows, cols) * sigma_max * eps`; singular values at or
/// below it are treated as zero.
pub fn truncation_threshold(rows: usize, cols: usize, sigma_max: f64) -> f64 {
    rows.max(cols) as f64 * sigma_max * f64::EPSILON
}

/// Minimum-norm least-squares solution `pinv(theta) * y`.
///
/// An all-zero `theta` yields an all-zero solution.
pub fn lstsq_minnorm(theta: &DenseMatrix, y: &DenseMatrix) -> Result<DenseMatrix> {
    let (p, r) = theta.shape();
    if y.rows() != p {
        return Err(Error::arg(format!(
            "right-hand side has {} rows, measurement matrix has {p}",
            y.rows()
        )));
    }
    let dec = svd(theta);
    let tau = truncation_threshold(p, r, dec.s.first().copied().unwrap_or(0.0));

    // a = V diag(1/s) U^T y over the retained components.
    let uty = dec.u.as_nalgebra().transpose() * y.as_nalgebra();
    let mut scaled = uty;
    for (i, &s) in dec.s.iter().enumerate() {
        let inv = if s > tau { 1.0 / s } else { 0.0 };
        scaled.row_mut(i).scale_mut(inv);
    }
    Ok(DenseMatrix::from_nalgebra(dec.v.as_nalgebra() * scaled))
}

/// `sigma_max / sigma_min`, or `+inf` when `sigma_min` falls at or below
/// the truncation threshold.
pub fn condition_number(theta: &DenseMatrix) -> f64 {
    let s = singular_values(theta);
    let smax = s[0];
    let smin = *s.last().expect("non-empty matrix");
    if smin <= truncation_threshold(theta.rows(), theta.cols(), smax) || smax == 0.0 {
        f64::INFINITY
    } else {
        smax / smin
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::gaussian_matrix;

    fn close(a: &DenseMatrix, b: &DenseMatrix, tol: f64) -> bool {
        a.sub(b).unwrap().frobenius_norm() <= tol * b.frobenius_norm().max(1.0)
    }

    #[test]
    fn diagonal_and_zero_spectra() {
        let d = DenseMatrix::from_diagonal(&[3.0, 1.0]).unwrap();
        assert_eq!(svd(&d).s, vec![3.0, 1.0]);
        let z = DenseMatrix::zeros(2, 2).unwrap();
        assert_eq!(svd(&z).s, vec![0.0, 0.0]);
    }

    #[test]
    fn random_reconstruction_and_orthonormality() {
        for (rows, cols) in [(8, 5), (5, 8), (1, 4), (6, 6)] {
            let a = gaussian_matrix(rows, cols, 11).unwrap();
            let dec = svd(&a);
            let rel = a.sub(&dec.recompose()).unwrap().frobenius_norm() / a.frobenius_norm();
            assert!(rel <= 1e-10, "{rows}x{cols}: {rel}");
            assert!(dec.s.windows(2).all(|w| w[0] >= w[1]));
            let k = rows.min(cols);
            let eye = DenseMatrix::identity(k).unwrap();
            assert!(close(&dec.u.transpose().matmul(&dec.u).unwrap(), &eye, 1e-12));
            assert!(close(&dec.v.transpose().matmul(&dec.v).unwrap(), &eye, 1e-12));
        }
    }

    #[test]
    fn lstsq_identity_mean_and_min_norm() {
        let y = DenseMatrix::from_rows(&[&[1.0, 2.0], &[3.0, 4.0], &[5.0, 6.0]]).unwrap();
        let a = lstsq_minnorm(&DenseMatrix::identity(3).unwrap(), &y).unwrap();
        assert!(close(&a, &y, 1e-14));

        let theta = DenseMatrix::from_rows(&[&[1.0], &[1.0]]).unwrap();
        let y = DenseMatrix::from_rows(&[&[1.0], &[3.0]]).unwrap();
        let a = lstsq_minnorm(&theta, &y).unwrap();
        assert!((a.get(0, 0) - 2.0).abs() < 1e-14);

        let theta = DenseMatrix::from_rows(&[&[1.0, 0.0, 0.0]]).unwrap();
        let y = DenseMatrix::from_rows(&[&[2.0]]).unwrap();
        let a = lstsq_minnorm(&theta, &y).unwrap();
        assert_eq!(a.shape(), (3, 1));
        assert!((a.get(0, 0) - 2.0).abs() < 1e-14);
        assert!(a.get(1, 0).abs() < 1e-14 && a.get(2, 0).abs() < 1e-14);
    }

    #[test]
    fn lstsq_zero_matrix_gives_zero() {
        let theta = DenseMatrix::zeros(3, 2).unwrap();
        let y = DenseMatrix::from_rows(&[&[1.0], &[2.0], &[3.0]]).unwrap();
        let a = lstsq_minnorm(&theta, &y).unwrap();
        assert_eq!(a.as_slice(), &[0.0, 0.0]);
    }

    #[test]
    fn lstsq_dimension_mismatch() {
        let theta = DenseMatrix::identity(3).unwrap();
        let y = DenseMatrix::zeros(2, 1).unwrap();
        assert!(lstsq_minnorm(&theta, &y).is_err());
    }

    #[test]
    fn lstsq_matches_direct_solve() {
        let theta = gaussian_matrix(7, 7, 5).unwrap();
        let y = gaussian_matrix(7, 3, 6).unwrap();
        let a = lstsq_minnorm(&theta, &y).unwrap();
        let direct = theta.as_nalgebra().clone().lu().solve(y.as_nalgebra()).unwrap();
        let direct = DenseMatrix::from_nalgebra(direct);
        assert!(a.sub(&direct).unwrap().frobenius_norm() <= 1e-9 * direct.frobenius_norm());
    }

    #[test]
    fn condition_numbers() {
        assert_eq!(condition_number(&DenseMatrix::identity(5).unwrap()), 1.0);
        let d = DenseMatrix::from_diagonal(&[4.0, 2.0]).unwrap();
        assert!((condition_number(&d) - 2.0).abs() < 1e-14);
        let s = DenseMatrix::from_rows(&[&[1.0, 1.0], &[1.0, 1.0]]).unwrap();
        assert_eq!(condition_number(&s), f64::INFINITY);
    }
}
