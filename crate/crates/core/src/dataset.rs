//! Data matrices: synthetic power-law sets, file ingestion, train/test
//! splits and spectrum utilities.
//!
//! Matrices are oriented state-by-snapshot: `n` rows (state entries) and
//! `m` columns (snapshots).

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;

use crate::error::{Error, Result};
use crate::linalg::random::rng_from_seed;
use crate::linalg::{random_orthonormal_columns, DenseMatrix};
use crate::seed;

/// Singular values `sigma_i = amplitude * i^exponent`, `i = 1..=len`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumSpec {
    pub amplitude: f64,
    pub exponent: f64,
    pub len: usize,
}

impl SpectrumSpec {
    pub fn new(amplitude: f64, exponent: f64, len: usize) -> Result<Self> {
        if !(amplitude > 0.0 && amplitude.is_finite()) {
            return Err(Error::arg(format!("amplitude must be positive, got {amplitude}")));
        }
        if !exponent.is_finite() {
            return Err(Error::arg("exponent must be finite"));
        }
        if len == 0 {
            return Err(Error::arg("spectrum length must be at least 1"));
        }
        Ok(Self {
            amplitude,
            exponent,
            len,
        })
    }
}

pub fn power_law_spectrum(spec: &SpectrumSpec) -> Vec<f64> {
    (1..=spec.len)
        .map(|i| spec.amplitude * (i as f64).powf(spec.exponent))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub enum Provenance {
    Synthetic {
        spectrum: SpectrumSpec,
        seed: u64,
    },
    File(PathBuf),
    InMemory,
}

#[derive(Debug, Clone)]
pub struct Dataset {
    pub x: DenseMatrix,
    pub name: String,
    pub provenance: Provenance,
}

impl Dataset {
    pub fn from_matrix(name: impl Into<String>, x: DenseMatrix) -> Self {
        Self {
            x,
            name: name.into(),
            provenance: Provenance::InMemory,
        }
    }

    /// State dimension.
    pub fn n(&self) -> usize {
        self.x.rows()
    }

    /// Snapshot count.
    pub fn m(&self) -> usize {
        self.x.cols()
    }
}

/// Builds `X = U diag(sigma) V^T` with seeded random orthonormal factors
/// `U` (`n x len`) and `V` (`m x len`).
pub fn synthesize(spec: &SpectrumSpec, n: usize, m: usize, seed: u64) -> Result<Dataset> {
    if spec.len > n.min(m) {
        return Err(Error::arg(format!(
            "spectrum length {} exceeds min(n, m) = {}",
            spec.len,
            n.min(m)
        )));
    }
    let sigma = power_law_spectrum(spec);
    let u = random_orthonormal_columns(n, spec.len, seed::derive(seed, &[0]))?;
    let v = random_orthonormal_columns(m, spec.len, seed::derive(seed, &[1]))?;
    let mut us = u.as_nalgebra().clone();
    for (j, s) in sigma.iter().enumerate() {
        us.column_mut(j).scale_mut(*s);
    }
    let x = DenseMatrix::from_nalgebra(us * v.as_nalgebra().transpose());
    Ok(Dataset {
        x,
        name: format!("powerlaw_a{}_b{}", spec.amplitude, spec.exponent),
        provenance: Provenance::Synthetic {
            spectrum: *spec,
            seed,
        },
    })
}

#[derive(Debug, Clone)]
pub struct SplitDataset {
    pub train: DenseMatrix,
    pub test: DenseMatrix,
    /// Ascending.
    pub train_indices: Vec<usize>,
    /// Ascending.
    pub test_indices: Vec<usize>,
}

/// Random partition of the snapshots; `round(train_fraction * m)` go to
/// training. Both sides must be non-empty.
pub fn split(x: &DenseMatrix, train_fraction: f64, seed: u64) -> Result<SplitDataset> {
    let m = x.cols();
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(Error::arg(format!(
            "train fraction must lie in (0, 1), got {train_fraction}"
        )));
    }
    let m_tr = (train_fraction * m as f64).round() as usize;
    if m_tr == 0 || m_tr == m {
        return Err(Error::arg(format!(
            "train fraction {train_fraction} of {m} snapshots leaves one side empty"
        )));
    }
    let mut order: Vec<usize> = (0..m).collect();
    order.shuffle(&mut rng_from_seed(seed));
    let mut train_indices = order[..m_tr].to_vec();
    let mut test_indices = order[m_tr..].to_vec();
    train_indices.sort_unstable();
    test_indices.sort_unstable();
    Ok(SplitDataset {
        train: x.select_columns(&train_indices)?,
        test: x.select_columns(&test_indices)?,
        train_indices,
        test_indices,
    })
}

/// Population variance of all entries about their global mean (Welford).
pub fn overall_variance(x: &DenseMatrix) -> f64 {
    let mut mean = 0.0;
    let mut m2 = 0.0;
    for (k, &v) in x.as_slice().iter().enumerate() {
        let delta = v - mean;
        mean += delta / (k + 1) as f64;
        m2 += delta * (v - mean);
    }
    (m2 / x.as_slice().len() as f64).max(0.0)
}

/// Smallest `k` whose cumulative singular-value sum reaches `fraction` of
/// the total. Energy is the plain sum of `sigma_i`, not of squares.
pub fn energy_rank(sigmas: &[f64], fraction: f64) -> Result<usize> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::arg(format!("energy fraction must lie in (0, 1], got {fraction}")));
    }
    if sigmas.iter().any(|s| !(*s >= 0.0) || !s.is_finite()) {
        return Err(Error::arg("singular values must be finite and non-negative"));
    }
    let total: f64 = sigmas.iter().sum();
    if total <= 0.0 {
        return Err(Error::arg("spectrum has no positive singular value"));
    }
    let mut cumulative = 0.0;
    for (k, s) in sigmas.iter().enumerate() {
        cumulative += s;
        if cumulative / total >= fraction {
            return Ok(k + 1);
        }
    }
    // Unreachable for fraction <= 1: the final partial sum equals the total.
    Ok(sigmas.len())
}

/// Least-squares fit of `log sigma_i = log a + b log i`; returns `(a, b)`.
pub fn fit_power_law(sigmas: &[f64]) -> Result<(f64, f64)> {
    if sigmas.is_empty() {
        return Err(Error::arg("cannot fit an empty spectrum"));
    }
    if let Some(i) = sigmas.iter().position(|s| !(*s > 0.0) || !s.is_finite()) {
        return Err(Error::arg(format!(
            "singular value {} at index {i} is not positive",
            sigmas[i]
        )));
    }
    let n = sigmas.len() as f64;
    let xs: Vec<f64> = (1..=sigmas.len()).map(|i| (i as f64).ln()).collect();
    let ys: Vec<f64> = sigmas.iter().map(|s| s.ln()).collect();
    let x_mean = xs.iter().sum::<f64>() / n;
    let y_mean = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - x_mean).powi(2)).sum();
    let sxy: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (x - x_mean) * (y - y_mean))
        .sum();
    // A single point fixes only the amplitude.
    let b = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let a = (y_mean - b * x_mean).exp();
    Ok((a, b))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixFormat {
    Csv,
    Binary,
}

impl MatrixFormat {
    /// `.csv` / `.txt` map to CSV, anything else to binary.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("csv") || ext.eq_ignore_ascii_case("txt") => {
                MatrixFormat::Csv
            }
            _ => MatrixFormat::Binary,
        }
    }
}

const MAGIC: &[u8; 4] = b"SSNS";

pub fn load_matrix(path: &Path, format: MatrixFormat) -> Result<Dataset> {
    let x = match format {
        MatrixFormat::Csv => read_csv(path)?,
        MatrixFormat::Binary => read_binary(path)?,
    };
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "matrix".to_owned());
    Ok(Dataset {
        x,
        name,
        provenance: Provenance::File(path.to_path_buf()),
    })
}

pub fn save_matrix(ds: &Dataset, path: &Path, format: MatrixFormat) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    match format {
        MatrixFormat::Csv => write_csv(&ds.x, &mut out)?,
        MatrixFormat::Binary => write_binary(&ds.x, &mut out)?,
    }
    out.flush()?;
    Ok(())
}

/// CSV layout: an optional `# rows,cols` header, then one line per state
/// entry with one comma-separated value per snapshot, 17 significant digits.
pub fn write_csv(x: &DenseMatrix, out: &mut impl Write) -> std::io::Result<()> {
    writeln!(out, "# {},{}", x.rows(), x.cols())?;
    for i in 0..x.rows() {
        let line: Vec<String> = (0..x.cols()).map(|j| format!("{:.16e}", x.get(i, j))).collect();
        writeln!(out, "{}", line.join(","))?;
    }
    Ok(())
}

pub fn write_binary(x: &DenseMatrix, out: &mut impl Write) -> std::io::Result<()> {
    out.write_all(MAGIC)?;
    out.write_all(&(x.rows() as u64).to_le_bytes())?;
    out.write_all(&(x.cols() as u64).to_le_bytes())?;
    for v in x.as_slice() {
        out.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}

fn read_csv(path: &Path) -> Result<DenseMatrix> {
    let reader = BufReader::new(File::open(path)?);
    let parse_err = |line: usize, message: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };

    let mut header: Option<(usize, usize)> = None;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(dims) = trimmed.strip_prefix('#') {
            if idx != 0 {
                return Err(parse_err(line_no, "header is only allowed on the first line".into()));
            }
            let parts: Vec<&str> = dims.split(',').map(str::trim).collect();
            let dims = match parts.as_slice() {
                [r, c] => r.parse::<usize>().ok().zip(c.parse::<usize>().ok()),
                _ => None,
            };
            header = Some(dims.ok_or_else(|| {
                parse_err(line_no, format!("expected `# rows,cols` header, got `{trimmed}`"))
            })?);
            continue;
        }
        let values = trimmed
            .split(',')
            .enumerate()
            .map(|(col, field)| {
                field.trim().parse::<f64>().map_err(|_| {
                    parse_err(line_no, format!("field {} is not a number: `{}`", col + 1, field.trim()))
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        if let Some(first) = rows.first() {
            if values.len() != first.len() {
                return Err(parse_err(
                    line_no,
                    format!(
                        "row {} has {} fields, expected {}",
                        rows.len() + 1,
                        values.len(),
                        first.len()
                    ),
                ));
            }
        }
        if let Some(col) = values.iter().position(|v| !v.is_finite()) {
            return Err(parse_err(line_no, format!("field {} is not finite", col + 1)));
        }
        rows.push(values);
    }

    let format_err = |message: String| Error::Format {
        path: path.to_path_buf(),
        message,
    };
    if rows.is_empty() {
        return Err(format_err("no matrix rows".into()));
    }
    let (n, m) = (rows.len(), rows[0].len());
    if let Some((hr, hc)) = header {
        if (hr, hc) != (n, m) {
            return Err(format_err(format!("header declares {hr}x{hc} but data is {n}x{m}")));
        }
    }
    let refs: Vec<&[f64]> = rows.iter().map(Vec::as_slice).collect();
    DenseMatrix::from_rows(&refs)
}

fn read_binary(path: &Path) -> Result<DenseMatrix> {
    let mut bytes = Vec::new();
    File::open(path)?.read_to_end(&mut bytes)?;
    let format_err = |message: String| Error::Format {
        path: path.to_path_buf(),
        message,
    };
    if bytes.len() < 20 {
        return Err(format_err(format!("file is {} bytes, shorter than the header", bytes.len())));
    }
    if &bytes[..4] != MAGIC {
        return Err(format_err("bad magic, expected SSNS".into()));
    }
    let rows = u64::from_le_bytes(bytes[4..12].try_into().unwrap());
    let cols = u64::from_le_bytes(bytes[12..20].try_into().unwrap());
    let expected = rows
        .checked_mul(cols)
        .and_then(|c| c.checked_mul(8))
        .ok_or_else(|| format_err(format!("header dimensions {rows}x{cols} overflow")))?;
    let payload = &bytes[20..];
    if payload.len() as u64 != expected {
        return Err(format_err(format!(
            "header declares {rows}x{cols} ({expected} bytes) but payload has {} bytes",
            payload.len()
        )));
    }
    let data = payload
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    DenseMatrix::new(rows as usize, cols as usize, data).map_err(|e| format_err(e.to_string()))
}
