//! Sensor location selection.
//!
//! Sensors are rows of the basis `Psi`. The first locations of every plan are
//! the pivots of a column-pivoted QR of `Psi^T`; when more sensors than
//! modes are requested the remaining locations come from an oversampling
//! strategy.

use std::fmt;
use std::str::FromStr;

use log::trace;
use nalgebra::DMatrix;

use crate::basis::{Basis, BasisKind};
use crate::error::{Error, Result};
use crate::linalg::random::rng_from_seed;
use crate::linalg::svd::smallest_singular_value;
use crate::linalg::{cpqr, DenseMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PlacementMethod {
    Qr,
    QrRandomOversample,
    QrOdeimE,
}

impl fmt::Display for PlacementMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PlacementMethod::Qr => "qr",
            PlacementMethod::QrRandomOversample => "qr+random-oversample",
            PlacementMethod::QrOdeimE => "qr+odeim-e",
        })
    }
}

/// Ordered, duplicate-free sensor locations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SensorPlan {
    pub locations: Vec<usize>,
    pub method: PlacementMethod,
    /// Modes used by the QR stage; also the modes used for reconstruction.
    pub r_used: usize,
}

impl SensorPlan {
    pub fn len(&self) -> usize {
        self.locations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.locations.is_empty()
    }
}

/// How sensors beyond the QR pivots are chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Oversample {
    /// Uniformly at random among unselected rows.
    #[default]
    Random,
    /// Greedily maximize the smallest singular value of the measurement matrix.
    OdeimE,
}

impl Oversample {
    pub fn as_str(self) -> &'static str {
        match self {
            Oversample::Random => "random",
            Oversample::OdeimE => "odeim-e",
        }
    }
}

impl FromStr for Oversample {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "random" => Ok(Oversample::Random),
            "odeim-e" | "odeime" => Ok(Oversample::OdeimE),
            other => Err(Error::arg(format!("unknown oversampling strategy `{other}`"))),
        }
    }
}

/// Mode count as a function of sensor count: `r = p` up to `threshold`
/// sensors, `r = ceil(p / factor)` beyond it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ModeRule {
    pub threshold: usize,
    pub factor: usize,
}

impl Default for ModeRule {
    fn default() -> Self {
        Self {
            threshold: 10,
            factor: 2,
        }
    }
}

impl ModeRule {
    pub fn modes_for(&self, p: usize) -> usize {
        if p <= self.threshold {
            p
        } else {
            p.div_ceil(self.factor.max(1))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct PlacementPolicy {
    pub mode_rule: ModeRule,
    pub oversample: Oversample,
}

/// First `k` QR pivots of `Psi^T`.
pub fn qr_pivots(basis: &Basis, k: usize) -> Result<SensorPlan> {
    if k > basis.r() {
        return Err(Error::arg(format!(
            "{k} sensors exceed the {} available modes; use an oversampling strategy",
            basis.r()
        )));
    }
    let pivots = cpqr(&basis.psi.transpose(), k)?;
    Ok(SensorPlan {
        locations: pivots.pivots,
        method: PlacementMethod::Qr,
        r_used: basis.r(),
    })
}

fn check_oversample(basis: &Basis, p: usize) -> Result<()> {
    if p <= basis.r() {
        return Err(Error::arg(format!(
            "oversampling needs more sensors than modes, got p = {p}, r = {}",
            basis.r()
        )));
    }
    if p > basis.n() {
        return Err(Error::arg(format!(
            "{p} sensors exceed the state dimension {}",
            basis.n()
        )));
    }
    Ok(())
}

/// QR pivots for the first `r` sensors, the remaining `p - r` drawn without
/// replacement from the unselected rows.
pub fn oversample_random(basis: &Basis, p: usize, seed: u64) -> Result<SensorPlan> {
    check_oversample(basis, p)?;
    let mut plan = qr_pivots(basis, basis.r())?;
    let mut taken = vec![false; basis.n()];
    plan.locations.iter().for_each(|&i| taken[i] = true);
    let pool: Vec<usize> = (0..basis.n()).filter(|&i| !taken[i]).collect();

    let mut rng = rng_from_seed(seed);
    let extra = rand::seq::index::sample(&mut rng, pool.len(), p - basis.r());
    plan.locations.extend(extra.iter().map(|k| pool[k]));
    plan.method = PlacementMethod::QrRandomOversample;
    Ok(plan)
}

/// QR pivots for the first `r` sensors, then each further sensor is the row
/// that maximizes `sigma_min` of the grown measurement matrix. Every
/// candidate is scored exactly; ties go to the lowest row index.
pub fn oversample_odeim_e(basis: &Basis, p: usize) -> Result<SensorPlan> {
    check_oversample(basis, p)?;
    let mut plan = qr_pivots(basis, basis.r())?;
    let (n, r) = basis.psi.shape();
    let psi = basis.psi.as_nalgebra();

    let mut taken = vec![false; n];
    let mut theta = DMatrix::<f64>::zeros(p, r);
    for (row, &loc) in plan.locations.iter().enumerate() {
        taken[loc] = true;
        theta.set_row(row, &psi.row(loc));
    }

    for filled in r..p {
        let mut best: Option<(usize, f64)> = None;
        for cand in (0..n).filter(|&i| !taken[i]) {
            theta.set_row(filled, &psi.row(cand));
            let smin = smallest_singular_value(&theta.rows(0, filled + 1).into_owned());
            if best.is_none_or(|(_, b)| smin > b) {
                best = Some((cand, smin));
            }
        }
        let (chosen, smin) = best.expect("p <= n leaves a candidate");
        trace!("odeim-e sensor {} -> row {chosen}, sigma_min {smin:.6e}", filled + 1);
        taken[chosen] = true;
        theta.set_row(filled, &psi.row(chosen));
        plan.locations.push(chosen);
    }
    plan.method = PlacementMethod::QrOdeimE;
    Ok(plan)
}

/// Places `p` sensors under a mode-count rule.
///
/// A randomized basis with more modes than sensors is undersampled: the
/// plan is the first `p` pivots of the full basis. Otherwise the basis is
/// cut to `r = rule(p)` modes, and oversampled when `p > r`.
pub fn place(basis: &Basis, p: usize, policy: &PlacementPolicy, seed: u64) -> Result<SensorPlan> {
    if p == 0 || p > basis.n() {
        return Err(Error::arg(format!(
            "sensor count {p} must lie in 1..={}",
            basis.n()
        )));
    }
    if basis.kind == BasisKind::Randomized && basis.r() > p {
        return qr_pivots(basis, p);
    }
    let r = policy.mode_rule.modes_for(p);
    if r > basis.r() {
        return Err(Error::arg(format!(
            "mode rule asks for {r} modes but the basis has {}",
            basis.r()
        )));
    }
    let basis = basis.truncated(r)?;
    if p <= r {
        qr_pivots(&basis, p)
    } else {
        match policy.oversample {
            Oversample::Random => oversample_random(&basis, p, seed),
            Oversample::OdeimE => oversample_odeim_e(&basis, p),
        }
    }
}

/// Row gather `C_J X`, in plan order.
pub fn measure(x: &DenseMatrix, plan: &SensorPlan) -> Result<DenseMatrix> {
    x.select_rows(&plan.locations)
}
