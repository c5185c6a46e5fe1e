//! Two-fidelity sensors: noise model, budgets and fidelity assignment.
//!
//! Noise levels are fractions of the reference data variance, so a level
//! `nu` gives sensors the standard deviation `sqrt(nu * Var(X_train))`.

use std::str::FromStr;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::random::rng_from_seed;
use crate::linalg::DenseMatrix;
use crate::placement::{measure, SensorPlan};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseModel {
    pub level_cheap: f64,
    pub level_exp: f64,
    pub reference_variance: f64,
}

impl NoiseModel {
    pub fn new(level_cheap: f64, level_exp: f64, reference_variance: f64) -> Result<Self> {
        for (name, v) in [
            ("cheap noise level", level_cheap),
            ("expensive noise level", level_exp),
            ("reference variance", reference_variance),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::arg(format!("{name} must be finite and non-negative, got {v}")));
            }
        }
        if level_exp > level_cheap {
            return Err(Error::arg(format!(
                "expensive sensors must not be noisier than cheap ones ({level_exp} > {level_cheap})"
            )));
        }
        Ok(Self {
            level_cheap,
            level_exp,
            reference_variance,
        })
    }

    pub fn sigma_cheap(&self) -> f64 {
        (self.level_cheap * self.reference_variance).sqrt()
    }

    pub fn sigma_exp(&self) -> f64 {
        (self.level_exp * self.reference_variance).sqrt()
    }
}

/// Unit costs and total budget; a composition is feasible when
/// `cost_cheap * p_cheap + cost_exp * p_exp <= budget`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BudgetSpec {
    pub cost_cheap: f64,
    pub cost_exp: f64,
    pub budget: f64,
}

/// Relative slack for rounding in the feasibility test.
const BUDGET_SLACK: f64 = 1e-12;

impl BudgetSpec {
    pub fn new(cost_cheap: f64, cost_exp: f64, budget: f64) -> Result<Self> {
        for (name, v) in [("cheap cost", cost_cheap), ("expensive cost", cost_exp), ("budget", budget)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::arg(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(Self {
            cost_cheap,
            cost_exp,
            budget,
        })
    }

    pub fn spend(&self, p_cheap: usize, p_exp: usize) -> f64 {
        self.cost_cheap * p_cheap as f64 + self.cost_exp * p_exp as f64
    }

    pub fn is_feasible(&self, p_cheap: usize, p_exp: usize) -> bool {
        self.spend(p_cheap, p_exp) <= self.budget * (1.0 + BUDGET_SLACK)
    }

    pub fn max_cheap(&self) -> usize {
        snapped_floor(self.budget / self.cost_cheap)
    }

    pub fn max_exp(&self) -> usize {
        snapped_floor(self.budget / self.cost_exp)
    }
}

/// `floor`, except that values within rounding of an integer snap to it,
/// so that `budget / cost` recovers the intended endpoint counts.
fn snapped_floor(x: f64) -> usize {
    let nearest = x.round();
    if (x - nearest).abs() <= 1e-9 * x.abs().max(1.0) {
        nearest.max(0.0) as usize
    } else {
        x.floor().max(0.0) as usize
    }
}

/// Budget with `B = cost_cheap * p_cheap_max` and `cost_exp = B / p_exp_max`,
/// so that both single-fidelity extremes spend exactly the budget.
pub fn budget_from_endpoints(p_cheap_max: usize, p_exp_max: usize, cost_cheap: f64) -> Result<BudgetSpec> {
    if p_cheap_max == 0 || p_exp_max == 0 {
        return Err(Error::arg("endpoint sensor counts must be at least 1"));
    }
    let budget = cost_cheap * p_cheap_max as f64;
    BudgetSpec::new(cost_cheap, budget / p_exp_max as f64, budget)
}

/// Which sensors of an ordered plan are expensive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Assignment {
    /// Expensive sensors take the leading (most important) locations.
    #[default]
    ExpFirst,
    /// Expensive sensors take the trailing locations.
    ExpLast,
}

impl Assignment {
    pub fn as_str(self) -> &'static str {
        match self {
            Assignment::ExpFirst => "exp-first",
            Assignment::ExpLast => "exp-last",
        }
    }
}

impl FromStr for Assignment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exp-first" => Ok(Assignment::ExpFirst),
            "exp-last" => Ok(Assignment::ExpLast),
            other => Err(Error::arg(format!("unknown assignment `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Composition {
    pub p_cheap: usize,
    pub p_exp: usize,
    pub assignment: Assignment,
}

impl Composition {
    pub fn total(&self) -> usize {
        self.p_cheap + self.p_exp
    }
}

/// Sweeps the budget share spent on expensive sensors over
/// `f = 0, 1/(steps-1), .., 1`: `p_exp = floor(f B / c_exp)` and
/// `p_cheap = floor((1 - f) B / c_cheap)`. Repeats are dropped, keeping the
/// first occurrence. The first entry is all-cheap, the last all-expensive.
pub fn enumerate_compositions(
    budget: &BudgetSpec,
    steps: usize,
    assignment: Assignment,
) -> Result<Vec<Composition>> {
    if steps < 2 {
        return Err(Error::arg(format!("composition sweep needs at least 2 steps, got {steps}")));
    }
    let mut out: Vec<Composition> = Vec::with_capacity(steps);
    for step in 0..steps {
        let f = step as f64 / (steps - 1) as f64;
        let mut p_exp = snapped_floor(f * budget.budget / budget.cost_exp);
        let mut p_cheap = snapped_floor((1.0 - f) * budget.budget / budget.cost_cheap);
        while !budget.is_feasible(p_cheap, p_exp) {
            if p_cheap > 0 {
                p_cheap -= 1;
            } else {
                p_exp -= 1;
            }
        }
        let comp = Composition {
            p_cheap,
            p_exp,
            assignment,
        };
        if !out.contains(&comp) {
            out.push(comp);
        }
    }
    Ok(out)
}

/// Per-sensor noise standard deviations for a plan.
pub fn assign_fidelities(plan: &SensorPlan, comp: &Composition, noise: &NoiseModel) -> Result<Vec<f64>> {
    let p = plan.len();
    if comp.total() != p {
        return Err(Error::arg(format!(
            "composition has {} sensors but the plan has {p}",
            comp.total()
        )));
    }
    let (se, sc) = (noise.sigma_exp(), noise.sigma_cheap());
    let sigmas = match comp.assignment {
        Assignment::ExpFirst => (0..p).map(|j| if j < comp.p_exp { se } else { sc }).collect(),
        Assignment::ExpLast => (0..p).map(|j| if j < comp.p_cheap { sc } else { se }).collect(),
    };
    Ok(sigmas)
}

/// `C_J X + E`, where row `j` of `E` is i.i.d. `N(0, sigma_j^2)`. Deviates
/// are drawn in column-major order from the seeded stream.
pub fn noisy_measure(x: &DenseMatrix, plan: &SensorPlan, sigmas: &[f64], seed: u64) -> Result<DenseMatrix> {
    if sigmas.len() != plan.len() {
        return Err(Error::arg(format!(
            "{} noise levels for {} sensors",
            sigmas.len(),
            plan.len()
        )));
    }
    if let Some(s) = sigmas.iter().find(|s| !(**s >= 0.0) || !s.is_finite()) {
        return Err(Error::arg(format!("noise standard deviation {s} is invalid")));
    }
    let clean = measure(x, plan)?;
    let mut rng = rng_from_seed(seed);
    let p = clean.rows();
    let data = clean
        .as_slice()
        .iter()
        .enumerate()
        .map(|(k, v)| {
            let z: f64 = rng.sample(StandardNormal);
            v + sigmas[k % p] * z
        })
        .collect();
    DenseMatrix::new(p, clean.cols(), data)
}
