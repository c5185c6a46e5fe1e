//! QR factorization with greedy column pivoting (Businger–Golub).
//!
//! At step `s` the unselected column with the largest residual norm over
//! rows `s..` is chosen as pivot, and a Householder reflector zeroes that
//! column below row `s`. The reflector is applied to every remaining column,
//! so residual norms at the next step are exact rather than downdated.
//! Ties in the argmax go to the lowest original column index.
//!
//! The pivot order maximizes, greedily, the volume of the leading selected
//! columns: `prod(r_diag)` equals `|det|` of the selected square block.

use crate::error::{Error, Result};

use super::DenseMatrix;

/// Outcome of a pivoted QR run of `k` steps.
#[derive(Debug, Clone, PartialEq)]
pub struct PivotResult {
    /// Selected columns, in selection order.
    pub pivots: Vec<usize>,
    /// `|R_ii|` for each step; non-increasing up to rounding.
    pub r_diag: Vec<f64>,
    /// Full column permutation. The first `k` entries are `pivots`; the
    /// unselected columns follow in ascending index order.
    pub permutation: Vec<usize>,
}

#[derive(Debug, Clone)]
struct Reflector {
    /// First row the reflector acts on.
    offset: usize,
    v: Vec<f64>,
    beta: f64,
}

impl Reflector {
    fn apply(&self, col: &mut [f64]) {
        let seg = &mut col[self.offset..];
        let dot: f64 = self.v.iter().zip(seg.iter()).map(|(a, b)| a * b).sum();
        let scale = self.beta * dot;
        for (x, vi) in seg.iter_mut().zip(&self.v) {
            *x -= scale * vi;
        }
    }
}

/// Factors `V·P = Q·R` from a pivoted QR run.
#[derive(Debug, Clone)]
pub struct CpqrFactorization {
    rows: usize,
    cols: usize,
    result: PivotResult,
    reflectors: Vec<Reflector>,
    /// Transformed matrix, columns in original order.
    work: Vec<f64>,
}

impl CpqrFactorization {
    pub fn pivot_result(&self) -> &PivotResult {
        &self.result
    }

    pub fn into_pivot_result(self) -> PivotResult {
        self.result
    }

    /// Orthogonal factor, `rows x rows`, as the product of the reflectors.
    pub fn q(&self) -> DenseMatrix {
        let r = self.rows;
        let mut q = vec![0.0; r * r];
        for i in 0..r {
            q[i * r + i] = 1.0;
        }
        // Q = H_0 H_1 ... H_{k-1}, applied to the identity right to left.
        for h in self.reflectors.iter().rev() {
            for col in q.chunks_mut(r) {
                h.apply(col);
            }
        }
        DenseMatrix::from_nalgebra(nalgebra::DMatrix::from_vec(r, r, q))
    }

    /// Triangular factor `rows x cols`, columns in permutation order. When
    /// fewer than `rows` steps were taken the trailing block holds the
    /// unreduced residual.
    pub fn r(&self) -> DenseMatrix {
        let (r, n) = (self.rows, self.cols);
        let mut data = Vec::with_capacity(r * n);
        for &j in &self.result.permutation {
            data.extend_from_slice(&self.work[j * r..(j + 1) * r]);
        }
        DenseMatrix::from_nalgebra(nalgebra::DMatrix::from_vec(r, n, data))
    }

    /// Permutation matrix `P` with `P[perm[c], c] = 1`.
    pub fn p(&self) -> DenseMatrix {
        let n = self.cols;
        let mut data = vec![0.0; n * n];
        for (c, &j) in self.result.permutation.iter().enumerate() {
            data[c * n + j] = 1.0;
        }
        DenseMatrix::from_nalgebra(nalgebra::DMatrix::from_vec(n, n, data))
    }
}

/// Greedy pivot selection: the first `k` pivots of `v` and their `|R_ii|`.
///
/// The input is not modified.
pub fn cpqr(v: &DenseMatrix, k: usize) -> Result<PivotResult> {
    cpqr_factorize(v, k).map(CpqrFactorization::into_pivot_result)
}

/// Runs `k` steps of pivoted Householder QR and keeps the factors.
pub fn cpqr_factorize(v: &DenseMatrix, k: usize) -> Result<CpqrFactorization> {
    let (rows, cols) = v.shape();
    if k == 0 || k > rows.min(cols) {
        return Err(Error::arg(format!(
            "pivot count {k} must lie in 1..={} for a {rows}x{cols} matrix",
            rows.min(cols)
        )));
    }

    let mut work = v.as_slice().to_vec();
    let mut selected = vec![false; cols];
    let mut pivots = Vec::with_capacity(k);
    let mut r_diag = Vec::with_capacity(k);
    let mut reflectors = Vec::with_capacity(k);

    for step in 0..k {
        let mut best: Option<(usize, f64)> = None;
        for j in (0..cols).filter(|&j| !selected[j]) {
            let col = &work[j * rows + step..(j + 1) * rows];
            let norm2: f64 = col.iter().map(|x| x * x).sum();
            if best.is_none_or(|(_, b)| norm2 > b) {
                best = Some((j, norm2));
            }
        }
        let (pivot, norm2) = best.expect("at least one unselected column remains");
        selected[pivot] = true;
        pivots.push(pivot);

        let norm = norm2.sqrt();
        r_diag.push(norm);
        if norm == 0.0 {
            continue;
        }

        let x = &work[pivot * rows + step..(pivot + 1) * rows];
        let alpha = if x[0] >= 0.0 { -norm } else { norm };
        let mut vh = x.to_vec();
        vh[0] -= alpha;
        let vtv: f64 = vh.iter().map(|a| a * a).sum();
        let h = Reflector {
            offset: step,
            v: vh,
            beta: 2.0 / vtv,
        };

        for j in (0..cols).filter(|&j| !selected[j]) {
            h.apply(&mut work[j * rows..(j + 1) * rows]);
        }
        let pcol = &mut work[pivot * rows..(pivot + 1) * rows];
        pcol[step] = alpha;
        pcol[step + 1..].iter_mut().for_each(|x| *x = 0.0);
        reflectors.push(h);
    }

    let mut permutation = pivots.clone();
    permutation.extend((0..cols).filter(|&j| !selected[j]));

    Ok(CpqrFactorization {
        rows,
        cols,
        result: PivotResult {
            pivots,
            r_diag,
            permutation,
        },
        reflectors,
        work,
    })
}
