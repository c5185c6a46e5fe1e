//! Reconstruction bases built from training snapshots.

use crate::error::{Error, Result};
use crate::linalg::{gaussian_matrix, svd, DenseMatrix, Svd};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BasisKind {
    /// Leading left singular vectors.
    Svd,
    /// Gaussian mixtures of the training columns, not orthonormalized.
    Randomized,
}

impl BasisKind {
    pub fn as_str(self) -> &'static str {
        match self {
            BasisKind::Svd => "svd",
            BasisKind::Randomized => "randomized",
        }
    }
}

impl std::str::FromStr for BasisKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "svd" => Ok(BasisKind::Svd),
            "randomized" | "random" => Ok(BasisKind::Randomized),
            other => Err(Error::arg(format!("unknown basis kind `{other}`"))),
        }
    }
}

/// `n x r` basis `Psi` together with how it was made.
#[derive(Debug, Clone, PartialEq)]
pub struct Basis {
    pub psi: DenseMatrix,
    pub kind: BasisKind,
    /// Generator seed; set iff `kind` is randomized.
    pub seed: Option<u64>,
}

impl Basis {
    /// Mode count.
    pub fn r(&self) -> usize {
        self.psi.cols()
    }

    /// State dimension.
    pub fn n(&self) -> usize {
        self.psi.rows()
    }

    /// The leading `r` modes. For both kinds this equals building the basis
    /// with `r` modes directly (the Gaussian mixing matrix is filled column
    /// by column, so its leading columns do not depend on the total).
    pub fn truncated(&self, r: usize) -> Result<Basis> {
        if r == self.r() {
            return Ok(self.clone());
        }
        Ok(Basis {
            psi: self.psi.leading_columns(r)?,
            kind: self.kind,
            seed: self.seed,
        })
    }

    /// Leading `r` left singular vectors of an existing decomposition, each
    /// flipped so that its largest-magnitude entry is positive.
    pub fn from_svd(dec: &Svd, r: usize) -> Result<Basis> {
        let k = dec.u.cols();
        if r == 0 || r > k {
            return Err(Error::arg(format!("mode count {r} must lie in 1..={k}")));
        }
        let n = dec.u.rows();
        let mut data = Vec::with_capacity(n * r);
        for j in 0..r {
            let col = dec.u.column(j);
            let lead = col
                .iter()
                .copied()
                .fold(0.0f64, |best, v| if v.abs() > best.abs() { v } else { best });
            let sign = if lead < 0.0 { -1.0 } else { 1.0 };
            data.extend(col.iter().map(|v| sign * v));
        }
        Ok(Basis {
            psi: DenseMatrix::new(n, r, data)?,
            kind: BasisKind::Svd,
            seed: None,
        })
    }
}

pub fn svd_basis(xtr: &DenseMatrix, r: usize) -> Result<Basis> {
    let limit = xtr.rows().min(xtr.cols());
    if r == 0 || r > limit {
        return Err(Error::arg(format!(
            "mode count {r} must lie in 1..={limit} for a {}x{} training matrix",
            xtr.rows(),
            xtr.cols()
        )));
    }
    Basis::from_svd(&svd(xtr), r)
}

/// `Psi = X_tr G` with `G` an `m x r` seeded Gaussian matrix. `r` may exceed
/// the rank or either dimension of `X_tr`.
pub fn randomized_basis(xtr: &DenseMatrix, r: usize, seed: u64) -> Result<Basis> {
    if r == 0 {
        return Err(Error::arg("mode count must be at least 1"));
    }
    let g = gaussian_matrix(xtr.cols(), r, seed)?;
    // Column by column (gemv), so each mode is bit-identical whatever `r` is.
    let x = xtr.as_nalgebra();
    let mut psi = nalgebra::DMatrix::<f64>::zeros(xtr.rows(), r);
    for j in 0..r {
        psi.column_mut(j).gemv(1.0, x, &g.as_nalgebra().column(j), 0.0);
    }
    Ok(Basis {
        psi: DenseMatrix::from_nalgebra(psi),
        kind: BasisKind::Randomized,
        seed: Some(seed),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::lstsq_minnorm;

    #[test]
    fn dominant_axis() {
        let x = DenseMatrix::from_diagonal(&[3.0, 1.0]).unwrap();
        let b = svd_basis(&x, 1).unwrap();
        assert!((b.psi.get(0, 0) - 1.0).abs() < 1e-14);
        assert!(b.psi.get(1, 0).abs() < 1e-14);
        assert_eq!(b.seed, None);
    }

    #[test]
    fn out_of_range_modes() {
        let x = gaussian_matrix(4, 6, 1).unwrap();
        assert!(svd_basis(&x, 0).is_err());
        assert!(svd_basis(&x, 5).is_err());
        assert!(randomized_basis(&x, 0, 1).is_err());
    }

    #[test]
    fn rank_one_projection_is_exact() {
        let u = gaussian_matrix(12, 1, 2).unwrap();
        let v = gaussian_matrix(1, 9, 3).unwrap();
        let x = u.matmul(&v).unwrap();
        let psi = svd_basis(&x, 1).unwrap().psi;
        let proj = psi.matmul(&psi.transpose().matmul(&x).unwrap()).unwrap();
        assert!(proj.sub(&x).unwrap().frobenius_norm() <= 1e-9 * x.frobenius_norm());
    }

    #[test]
    fn randomized_shapes_and_zero() {
        let z = DenseMatrix::zeros(5, 3).unwrap();
        let b = randomized_basis(&z, 7, 4).unwrap();
        assert_eq!(b.psi.shape(), (5, 7));
        assert_eq!(b.psi.max_abs(), 0.0);
        assert_eq!(b.seed, Some(4));
    }

    #[test]
    fn randomized_truncation_matches_direct_build() {
        let x = gaussian_matrix(10, 8, 5).unwrap();
        let full = randomized_basis(&x, 6, 77).unwrap();
        let small = randomized_basis(&x, 4, 77).unwrap();
        assert_eq!(full.truncated(4).unwrap(), small);
    }

    #[test]
    fn randomized_columns_lie_in_training_span() {
        let x = gaussian_matrix(20, 5, 6).unwrap();
        let b = randomized_basis(&x, 9, 1).unwrap();
        let coeffs = lstsq_minnorm(&x, &b.psi).unwrap();
        let resid = x.matmul(&coeffs).unwrap().sub(&b.psi).unwrap().frobenius_norm();
        assert!(resid <= 1e-8 * b.psi.frobenius_norm());
    }
}
