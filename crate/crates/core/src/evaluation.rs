//! Reconstruction, error metrics and the Monte-Carlo experiment harness.
//!
//! A trial is identified by `(split, cv, noise)` indices. Each stage draws
//! its randomness from a seed derived from the master seed and only the
//! indices that stage depends on (see [`TrialSeeds`]), so trials are pure
//! functions of `(dataset, config, indices, cell)` and aggregate results do
//! not depend on scheduling. Different cells of one experiment share the
//! same seeds.

use std::fmt;
use std::str::FromStr;

use log::warn;
use rayon::prelude::*;

use crate::basis::{randomized_basis, Basis, BasisKind};
use crate::dataset::{overall_variance, split, Dataset, SplitDataset};
use crate::error::{Error, Result};
use crate::linalg::{lstsq_minnorm, svd, DenseMatrix, Svd};
use crate::multifidelity::{
    assign_fidelities, enumerate_compositions, noisy_measure, Assignment, BudgetSpec, Composition,
    NoiseModel,
};
use crate::placement::{
    measure, oversample_odeim_e, oversample_random, place, qr_pivots, Oversample, PlacementPolicy,
    SensorPlan,
};
use crate::seed;

/// `X_hat = Psi pinv(Theta) Y` with `Theta = C_J Psi`.
pub fn reconstruct(basis: &Basis, plan: &SensorPlan, y: &DenseMatrix) -> Result<DenseMatrix> {
    let theta = measure(&basis.psi, plan)?;
    let coeffs = lstsq_minnorm(&theta, y)?;
    basis.psi.matmul(&coeffs)
}

/// `||X - X_hat||_F / ||X||_F`.
pub fn fractional_error(x: &DenseMatrix, xhat: &DenseMatrix) -> Result<f64> {
    let denom = x.frobenius_norm();
    if denom == 0.0 {
        return Err(Error::arg("fractional error is undefined for an all-zero reference"));
    }
    Ok(x.sub(xhat)?.frobenius_norm() / denom)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TrialCounts {
    pub splits: usize,
    pub placement_cv: usize,
    pub noise: usize,
}

impl TrialCounts {
    pub fn total(&self) -> usize {
        self.splits * self.placement_cv * self.noise
    }
}

impl Default for TrialCounts {
    fn default() -> Self {
        Self {
            splits: 20,
            placement_cv: 20,
            noise: 10,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub basis: BasisKind,
    pub policy: PlacementPolicy,
    /// Variance fraction for cheap sensors; single-fidelity sweeps use it
    /// for every sensor.
    pub noise_cheap: f64,
    /// Variance fraction for expensive sensors.
    pub noise_exp: f64,
    pub assignment: Assignment,
    /// Needed by [`mf_sweep`] only.
    pub budget: Option<BudgetSpec>,
    pub composition_steps: usize,
    /// Absolute band in fractional error for regime classification.
    pub band: f64,
    pub train_fraction: f64,
    pub counts: TrialCounts,
    pub master_seed: u64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            basis: BasisKind::Svd,
            policy: PlacementPolicy::default(),
            noise_cheap: 0.02,
            noise_exp: 0.01,
            assignment: Assignment::ExpFirst,
            budget: None,
            composition_steps: 11,
            band: 0.02,
            train_fraction: 0.8,
            counts: TrialCounts::default(),
            master_seed: 0,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        let c = &self.counts;
        if c.splits == 0 || c.placement_cv == 0 || c.noise == 0 {
            return Err(Error::arg(format!(
                "trial counts must all be at least 1, got {}x{}x{}",
                c.splits, c.placement_cv, c.noise
            )));
        }
        NoiseModel::new(self.noise_cheap, self.noise_exp, 0.0)?;
        if !(self.band >= 0.0 && self.band.is_finite()) {
            return Err(Error::arg(format!("classification band {} is invalid", self.band)));
        }
        Ok(())
    }

    /// Stable `key=value` listing of every field.
    pub fn describe(&self) -> Vec<(&'static str, String)> {
        let budget = self
            .budget
            .map(|b| format!("{:e}/{:e}/{:e}", b.cost_cheap, b.cost_exp, b.budget))
            .unwrap_or_else(|| "none".into());
        vec![
            ("basis", self.basis.as_str().into()),
            ("mode_threshold", self.policy.mode_rule.threshold.to_string()),
            ("mode_factor", self.policy.mode_rule.factor.to_string()),
            ("oversample", self.policy.oversample.as_str().into()),
            ("noise_cheap", format!("{:e}", self.noise_cheap)),
            ("noise_exp", format!("{:e}", self.noise_exp)),
            ("assignment", self.assignment.as_str().into()),
            ("budget", budget),
            ("composition_steps", self.composition_steps.to_string()),
            ("band", format!("{:e}", self.band)),
            ("train_fraction", format!("{:e}", self.train_fraction)),
            ("splits", self.counts.splits.to_string()),
            ("placement_cv", self.counts.placement_cv.to_string()),
            ("noise_draws", self.counts.noise.to_string()),
            ("master_seed", self.master_seed.to_string()),
        ]
    }

    /// FNV-1a over [`describe`](Self::describe).
    pub fn fingerprint(&self) -> u64 {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for (k, v) in self.describe() {
            for b in k.bytes().chain(*b"=").chain(v.bytes()).chain(*b"\n") {
                h ^= b as u64;
                h = h.wrapping_mul(0x0000_0100_0000_01b3);
            }
        }
        h
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TrialIndex {
    pub split: usize,
    pub cv: usize,
    pub noise: usize,
}

const STREAM_SPLIT: u64 = 1;
const STREAM_BASIS: u64 = 2;
const STREAM_PLACEMENT: u64 = 3;
const STREAM_NOISE: u64 = 4;

/// Per-stage seeds of one trial, each `seed::derive(master, key)`:
///
/// | stage      | key                              |
/// |------------|----------------------------------|
/// | split      | `[1, split]`                     |
/// | basis      | `[2, split]`                     |
/// | placement  | `[3, split, cv]`                 |
/// | noise      | `[4, split, cv, noise]`          |
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrialSeeds {
    pub split: u64,
    pub basis: u64,
    pub placement: u64,
    pub noise: u64,
}

impl TrialSeeds {
    pub fn derive(master: u64, idx: TrialIndex) -> Self {
        let (s, c, n) = (idx.split as u64, idx.cv as u64, idx.noise as u64);
        Self {
            split: seed::derive(master, &[STREAM_SPLIT, s]),
            basis: seed::derive(master, &[STREAM_BASIS, s]),
            placement: seed::derive(master, &[STREAM_PLACEMENT, s, c]),
            noise: seed::derive(master, &[STREAM_NOISE, s, c, n]),
        }
    }
}

/// What a trial evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Cell {
    /// Explicit mode and sensor counts, single fidelity (cheap level).
    /// `p <= r` uses QR pivots only; `p > r` oversamples per the policy.
    Modes { r: usize, p: usize },
    /// A cheap/expensive mix placed with the policy's mode rule.
    Composition(Composition),
}

/// State shared by all trials of one train/test split.
pub struct SplitContext {
    data: SplitDataset,
    reference_variance: f64,
    kind: BasisKind,
    basis_seed: u64,
    svd: Option<Svd>,
}

impl SplitContext {
    pub fn new(ds: &Dataset, config: &ExperimentConfig, split_idx: usize) -> Result<Self> {
        let seeds = TrialSeeds::derive(
            config.master_seed,
            TrialIndex {
                split: split_idx,
                cv: 0,
                noise: 0,
            },
        );
        let data = split(&ds.x, config.train_fraction, seeds.split)?;
        let reference_variance = overall_variance(&data.train);
        let svd = match config.basis {
            BasisKind::Svd => Some(svd(&data.train)),
            BasisKind::Randomized => None,
        };
        Ok(Self {
            data,
            reference_variance,
            kind: config.basis,
            basis_seed: seeds.basis,
            svd,
        })
    }

    pub fn split(&self) -> &SplitDataset {
        &self.data
    }

    /// Variance of the training snapshots; the scale for noise levels.
    pub fn reference_variance(&self) -> f64 {
        self.reference_variance
    }

    pub fn basis(&self, r: usize) -> Result<Basis> {
        match &self.svd {
            Some(dec) => Basis::from_svd(dec, r),
            None => randomized_basis(&self.data.train, r, self.basis_seed),
        }
    }

    /// Largest mode count the basis kind supports here, if bounded.
    pub fn max_modes(&self) -> Option<usize> {
        match self.kind {
            BasisKind::Svd => Some(self.data.train.rows().min(self.data.train.cols())),
            BasisKind::Randomized => None,
        }
    }

    /// Builds the plan and per-sensor noise for a cell.
    pub fn plan(
        &self,
        config: &ExperimentConfig,
        cell: &Cell,
        placement_seed: u64,
    ) -> Result<(Basis, SensorPlan, Vec<f64>)> {
        let noise = NoiseModel::new(config.noise_cheap, config.noise_exp, self.reference_variance)?;
        match *cell {
            Cell::Modes { r, p } => {
                let basis = self.basis(r)?;
                let plan = if p <= r {
                    qr_pivots(&basis, p)?
                } else {
                    match config.policy.oversample {
                        Oversample::Random => oversample_random(&basis, p, placement_seed)?,
                        Oversample::OdeimE => oversample_odeim_e(&basis, p)?,
                    }
                };
                let sigmas = vec![noise.sigma_cheap(); plan.len()];
                Ok((basis, plan, sigmas))
            }
            Cell::Composition(comp) => {
                let p = comp.total();
                let basis = self.basis(config.policy.mode_rule.modes_for(p))?;
                let plan = place(&basis, p, &config.policy, placement_seed)?;
                let sigmas = assign_fidelities(&plan, &comp, &noise)?;
                let basis = basis.truncated(plan.r_used)?;
                Ok((basis, plan, sigmas))
            }
        }
    }

    pub fn trial(&self, config: &ExperimentConfig, cell: &Cell, seeds: &TrialSeeds) -> Result<f64> {
        let (basis, plan, sigmas) = self.plan(config, cell, seeds.placement)?;
        let y = noisy_measure(&self.data.test, &plan, &sigmas, seeds.noise)?;
        let xhat = reconstruct(&basis, &plan, &y)?;
        fractional_error(&self.data.test, &xhat)
    }
}

fn check_index(config: &ExperimentConfig, idx: TrialIndex) -> Result<()> {
    let c = &config.counts;
    if idx.split >= c.splits || idx.cv >= c.placement_cv || idx.noise >= c.noise {
        return Err(Error::arg(format!(
            "trial index ({}, {}, {}) outside counts {}x{}x{}",
            idx.split, idx.cv, idx.noise, c.splits, c.placement_cv, c.noise
        )));
    }
    Ok(())
}

/// Fractional error of a single trial.
pub fn run_trial(ds: &Dataset, config: &ExperimentConfig, idx: TrialIndex, cell: &Cell) -> Result<f64> {
    config.validate()?;
    check_index(config, idx)?;
    let ctx = SplitContext::new(ds, config, idx.split)?;
    ctx.trial(config, cell, &TrialSeeds::derive(config.master_seed, idx))
}

/// Summary statistics of a cell's trial errors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellStats {
    pub mean: f64,
    /// Sample standard deviation (`n - 1` denominator); zero for one trial.
    pub std: f64,
    pub trials: usize,
}

/// Neumaier-compensated sum.
fn compensated_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

impl CellStats {
    pub fn from_errors(errors: &[f64]) -> Self {
        let n = errors.len();
        let mean = compensated_sum(errors.iter().copied()) / n as f64;
        let std = if n > 1 {
            (compensated_sum(errors.iter().map(|e| (e - mean).powi(2))) / (n - 1) as f64).sqrt()
        } else {
            0.0
        };
        Self { mean, std, trials: n }
    }

    pub fn standard_error(&self) -> f64 {
        self.std / (self.trials as f64).sqrt()
    }
}

/// `sqrt(se_a^2 + se_b^2)` for comparing two cell means.
pub fn pooled_standard_error(a: &CellStats, b: &CellStats) -> f64 {
    (a.standard_error().powi(2) + b.standard_error().powi(2)).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    Cheap,
    Expensive,
    Inconclusive,
    /// A mixed composition beats both single-fidelity extremes by more than the band.
    MixedBest,
}

impl Regime {
    pub fn as_str(self) -> &'static str {
        match self {
            Regime::Cheap => "cheap",
            Regime::Expensive => "expensive",
            Regime::Inconclusive => "inconclusive",
            Regime::MixedBest => "mixed-best",
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Regime {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cheap" => Ok(Regime::Cheap),
            "expensive" => Ok(Regime::Expensive),
            "inconclusive" => Ok(Regime::Inconclusive),
            "mixed-best" => Ok(Regime::MixedBest),
            other => Err(Error::arg(format!("unknown regime `{other}`"))),
        }
    }
}

/// Compares the all-cheap and all-expensive errors; differences below
/// `band` (absolute) are inconclusive.
pub fn classify_regime(err_all_cheap: f64, err_all_exp: f64, band: f64) -> Regime {
    if (err_all_cheap - err_all_exp).abs() < band {
        Regime::Inconclusive
    } else if err_all_cheap < err_all_exp {
        Regime::Cheap
    } else {
        Regime::Expensive
    }
}

/// Classifies a whole composition sweep, ordered from all-cheap to
/// all-expensive. An interior point below both endpoints by more than
/// `band` makes the sweep mixed-best; otherwise the endpoints decide.
pub fn classify_sweep(errors: &[f64], band: f64) -> Result<Regime> {
    let (first, last) = match errors {
        [] | [_] => {
            return Err(Error::arg("classification needs at least two sweep points"));
        }
        [first, .., last] => (*first, *last),
    };
    let interior_min = errors[1..errors.len() - 1]
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    if interior_min < first.min(last) - band {
        return Ok(Regime::MixedBest);
    }
    Ok(classify_regime(first, last, band))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Provenance {
    pub config_fingerprint: u64,
    pub master_seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellResult {
    pub cell: Cell,
    pub stats: CellStats,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentResult {
    pub basis: BasisKind,
    pub cells: Vec<CellResult>,
    /// Set for composition sweeps.
    pub regime: Option<Regime>,
    pub warnings: Vec<String>,
    pub provenance: Provenance,
}

/// Runs every cell over every trial. Trial errors are gathered in
/// `(split, cv, noise)` order before reduction, so the statistics are the
/// same for any thread count.
pub fn run_cells(ds: &Dataset, config: &ExperimentConfig, cells: &[Cell]) -> Result<Vec<CellStats>> {
    config.validate()?;
    let counts = config.counts;
    let per_split: Vec<Vec<Vec<f64>>> = (0..counts.splits)
        .into_par_iter()
        .map(|s| {
            let ctx = SplitContext::new(ds, config, s)?;
            let jobs: Vec<(usize, TrialIndex)> = (0..cells.len())
                .flat_map(|c| {
                    (0..counts.placement_cv).flat_map(move |cv| {
                        (0..counts.noise).map(move |noise| (c, TrialIndex { split: s, cv, noise }))
                    })
                })
                .collect();
            let errors: Vec<f64> = jobs
                .par_iter()
                .map(|(c, idx)| {
                    ctx.trial(config, &cells[*c], &TrialSeeds::derive(config.master_seed, *idx))
                })
                .collect::<Result<_>>()?;
            let per_cell = counts.placement_cv * counts.noise;
            Ok(errors.chunks(per_cell).map(<[f64]>::to_vec).collect())
        })
        .collect::<Result<_>>()?;

    Ok((0..cells.len())
        .map(|c| {
            let errors: Vec<f64> = per_split.iter().flat_map(|s| s[c].iter().copied()).collect();
            CellStats::from_errors(&errors)
        })
        .collect())
}

fn validate_mode_cell(ds: &Dataset, config: &ExperimentConfig, r: usize, p: usize) -> Result<()> {
    let n = ds.n();
    let m_tr = (config.train_fraction * ds.m() as f64).round() as usize;
    let bad = |why: String| Err(Error::arg(format!("infeasible cell (r={r}, p={p}): {why}")));
    if r == 0 || p == 0 {
        return bad("mode and sensor counts must be positive".into());
    }
    if p > n {
        return bad(format!("more sensors than the {n} state entries"));
    }
    if p <= r && p > n.min(r) {
        return bad("too many pivots".into());
    }
    if p > r && r > n {
        return bad(format!("more modes than the {n} state entries"));
    }
    if config.basis == BasisKind::Svd && r > n.min(m_tr) {
        return bad(format!("SVD basis has at most {} modes", n.min(m_tr)));
    }
    Ok(())
}

/// Mean error for every `(r, p)` in the grid product, r-major.
pub fn sweep_modes_sensors(
    ds: &Dataset,
    config: &ExperimentConfig,
    r_grid: &[usize],
    p_grid: &[usize],
) -> Result<ExperimentResult> {
    if r_grid.is_empty() || p_grid.is_empty() {
        return Err(Error::arg("mode and sensor grids must be non-empty"));
    }
    let mut cells = Vec::with_capacity(r_grid.len() * p_grid.len());
    for &r in r_grid {
        for &p in p_grid {
            validate_mode_cell(ds, config, r, p)?;
            cells.push(Cell::Modes { r, p });
        }
    }
    let stats = run_cells(ds, config, &cells)?;
    Ok(ExperimentResult {
        basis: config.basis,
        cells: cells
            .into_iter()
            .zip(stats)
            .map(|(cell, stats)| CellResult { cell, stats })
            .collect(),
        regime: None,
        warnings: Vec::new(),
        provenance: Provenance {
            config_fingerprint: config.fingerprint(),
            master_seed: config.master_seed,
        },
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinErrorPoint {
    pub p: usize,
    pub min_error: f64,
    pub argmin_r: usize,
}

/// For each sensor count, the lowest mean error over mode counts and the
/// mode count attaining it (lowest `r` on ties). With `modes_below_sensors`
/// only cells with `r < p` compete, and sensor counts with no such cell are
/// omitted. Output is sorted by `p`.
pub fn min_error_curve(grid: &ExperimentResult, modes_below_sensors: bool) -> Vec<MinErrorPoint> {
    let mut best: Vec<MinErrorPoint> = Vec::new();
    for cell in &grid.cells {
        let Cell::Modes { r, p } = cell.cell else {
            continue;
        };
        if modes_below_sensors && r >= p {
            continue;
        }
        let e = cell.stats.mean;
        match best.iter_mut().find(|b| b.p == p) {
            Some(b) => {
                if e < b.min_error || (e == b.min_error && r < b.argmin_r) {
                    b.min_error = e;
                    b.argmin_r = r;
                }
            }
            None => best.push(MinErrorPoint {
                p,
                min_error: e,
                argmin_r: r,
            }),
        }
    }
    best.sort_by_key(|b| b.p);
    best
}

/// Composition sweep from all-cheap to all-expensive under the configured
/// budget. Compositions with no sensors are skipped with a warning.
pub fn mf_sweep(ds: &Dataset, config: &ExperimentConfig) -> Result<ExperimentResult> {
    let budget = config
        .budget
        .ok_or_else(|| Error::arg("composition sweep needs a budget"))?;
    let mut warnings = Vec::new();
    let mut cells = Vec::new();
    for comp in enumerate_compositions(&budget, config.composition_steps, config.assignment)? {
        if comp.total() == 0 {
            let msg = format!(
                "skipping empty composition at spend fraction between endpoints (cheap cost {}, expensive cost {})",
                budget.cost_cheap, budget.cost_exp
            );
            warn!("{msg}");
            warnings.push(msg);
            continue;
        }
        if comp.total() > ds.n() {
            return Err(Error::arg(format!(
                "composition ({} cheap, {} expensive) exceeds the {} state entries",
                comp.p_cheap,
                comp.p_exp,
                ds.n()
            )));
        }
        cells.push(Cell::Composition(comp));
    }
    let stats = run_cells(ds, config, &cells)?;
    let means: Vec<f64> = stats.iter().map(|s| s.mean).collect();
    let regime = if means.len() >= 2 {
        Some(classify_sweep(&means, config.band)?)
    } else {
        None
    };
    Ok(ExperimentResult {
        basis: config.basis,
        cells: cells
            .into_iter()
            .zip(stats)
            .map(|(cell, stats)| CellResult { cell, stats })
            .collect(),
        regime,
        warnings,
        provenance: Provenance {
            config_fingerprint: config.fingerprint(),
            master_seed: config.master_seed,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::gaussian_matrix;
    use crate::placement::PlacementMethod;

    #[test]
    fn error_metric_cases() {
        let x = gaussian_matrix(4, 3, 1).unwrap();
        assert_eq!(fractional_error(&x, &x).unwrap(), 0.0);
        let zero = DenseMatrix::zeros(4, 3).unwrap();
        assert!((fractional_error(&x, &zero).unwrap() - 1.0).abs() < 1e-15);
        assert!((fractional_error(&x, &x.scaled(2.0)).unwrap() - 1.0).abs() < 1e-15);
        assert!(fractional_error(&zero, &x).is_err());
    }

    #[test]
    fn identity_basis_reconstruction() {
        let basis = Basis {
            psi: DenseMatrix::identity(5).unwrap(),
            kind: BasisKind::Svd,
            seed: None,
        };
        let plan = SensorPlan {
            locations: (0..5).collect(),
            method: PlacementMethod::Qr,
            r_used: 5,
        };
        let y = gaussian_matrix(5, 2, 3).unwrap();
        let xhat = reconstruct(&basis, &plan, &y).unwrap();
        assert!(xhat.sub(&y).unwrap().frobenius_norm() < 1e-14);
        let zero = DenseMatrix::zeros(5, 2).unwrap();
        assert_eq!(reconstruct(&basis, &plan, &zero).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn regime_labels() {
        assert_eq!(classify_regime(0.10, 0.30, 0.02), Regime::Cheap);
        assert_eq!(classify_regime(0.30, 0.285, 0.02), Regime::Inconclusive);
        assert_eq!(classify_regime(0.50, 0.20, 0.02), Regime::Expensive);
        assert_eq!(classify_sweep(&[0.5, 0.5, 0.5], 0.02).unwrap(), Regime::Inconclusive);
        assert_eq!(classify_sweep(&[0.5, 0.3, 0.4], 0.02).unwrap(), Regime::MixedBest);
        assert_eq!(classify_sweep(&[0.5, 0.39, 0.4], 0.02).unwrap(), Regime::Expensive);
        assert!(classify_sweep(&[0.5], 0.02).is_err());
    }

    #[test]
    fn stats_reduction() {
        let s = CellStats::from_errors(&[1.0, 2.0, 3.0]);
        assert_eq!((s.mean, s.std, s.trials), (2.0, 1.0, 3));
        assert_eq!(CellStats::from_errors(&[0.7]).std, 0.0);
    }

    #[test]
    fn min_curve_constraint() {
        let mk = |r, p, mean| CellResult {
            cell: Cell::Modes { r, p },
            stats: CellStats {
                mean,
                std: 0.0,
                trials: 1,
            },
        };
        let grid = ExperimentResult {
            basis: BasisKind::Randomized,
            cells: vec![mk(5, 10, 0.4), mk(10, 10, 0.2), mk(20, 10, 0.1), mk(5, 20, 0.3), mk(10, 20, 0.3)],
            regime: None,
            warnings: vec![],
            provenance: Provenance {
                config_fingerprint: 0,
                master_seed: 0,
            },
        };
        let free = min_error_curve(&grid, false);
        assert_eq!((free[0].p, free[0].argmin_r, free[0].min_error), (10, 20, 0.1));
        assert_eq!((free[1].p, free[1].argmin_r), (20, 5));
        let restricted = min_error_curve(&grid, true);
        assert!(restricted.iter().all(|pt| pt.argmin_r < pt.p));
        assert_eq!(restricted[0].argmin_r, 5);
    }

    #[test]
    fn seeds_separate_stages() {
        let a = TrialSeeds::derive(1, TrialIndex { split: 0, cv: 0, noise: 0 });
        let b = TrialSeeds::derive(1, TrialIndex { split: 0, cv: 0, noise: 1 });
        let c = TrialSeeds::derive(1, TrialIndex { split: 0, cv: 1, noise: 0 });
        assert_eq!((a.split, a.basis, a.placement), (b.split, b.basis, b.placement));
        assert_ne!(a.noise, b.noise);
        assert_eq!(a.split, c.split);
        assert_ne!(a.placement, c.placement);
    }

    #[test]
    fn config_validation() {
        let mut cfg = ExperimentConfig::default();
        assert!(cfg.validate().is_ok());
        cfg.counts.noise = 0;
        assert!(cfg.validate().is_err());
        let cfg = ExperimentConfig {
            noise_exp: 0.5,
            ..ExperimentConfig::default()
        };
        assert!(cfg.validate().is_err());
        assert_ne!(ExperimentConfig::default().fingerprint(), cfg.fingerprint());
    }
}
