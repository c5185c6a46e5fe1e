//! Seeded random matrices.
//!
//! Every generator is a ChaCha8 stream keyed by `seed_from_u64(seed)`;
//! normal deviates come from `rand_distr::StandardNormal` (ziggurat) and are
//! drawn in column-major order. Output is reproducible per seed on a given
//! platform.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

use super::DenseMatrix;

pub(crate) fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `rows x cols` matrix of i.i.d. standard normal entries.
pub fn gaussian_matrix(rows: usize, cols: usize, seed: u64) -> Result<DenseMatrix> {
    let mut rng = rng_from_seed(seed);
    let data = (0..rows * cols).map(|_| rng.sample(StandardNormal)).collect();
    DenseMatrix::new(rows, cols, data)
}

/// `rows x cols` matrix with orthonormal columns (`cols <= rows`), the Q
/// factor of a seeded Gaussian matrix with R's diagonal made positive.
/// That sign convention makes Q Haar-distributed and unique per seed.
pub fn random_orthonormal_columns(rows: usize, cols: usize, seed: u64) -> Result<DenseMatrix> {
    if cols > rows {
        return Err(Error::arg(format!(
            "cannot have {cols} orthonormal columns in dimension {rows}"
        )));
    }
    let g = gaussian_matrix(rows, cols, seed)?;
    let qr = g.as_nalgebra().clone().qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..cols {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    Ok(DenseMatrix::from_nalgebra(q))
}

/// `n x n` orthogonal matrix.
pub fn random_orthogonal(n: usize, seed: u64) -> Result<DenseMatrix> {
    random_orthonormal_columns(n, n, seed)
}
