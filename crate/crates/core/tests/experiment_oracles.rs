use proptest::prelude::*;
use sparsesense::basis::{svd_basis, BasisKind};
use sparsesense::dataset::{synthesize, Dataset, SpectrumSpec};
use sparsesense::evaluation::{
    fractional_error, mf_sweep, pooled_standard_error, reconstruct, run_cells, run_trial,
    sweep_modes_sensors, Cell, CellStats, ExperimentConfig, TrialCounts, TrialIndex,
};
use sparsesense::linalg::{gaussian_matrix, random_orthonormal_columns};
use sparsesense::multifidelity::{
    assign_fidelities, budget_from_endpoints, enumerate_compositions, Assignment, BudgetSpec,
    NoiseModel,
};
use sparsesense::placement::{measure, qr_pivots, SensorPlan};
use sparsesense::DenseMatrix;

fn small_dataset(b: f64, seed: u64) -> Dataset {
    synthesize(&SpectrumSpec::new(100.0, b, 60).unwrap(), 80, 120, seed).unwrap()
}

fn counts(splits: usize, cv: usize, noise: usize) -> TrialCounts {
    TrialCounts {
        splits,
        placement_cv: cv,
        noise,
    }
}

#[test]
fn exact_recovery_of_in_span_snapshots() {
    let u = random_orthonormal_columns(200, 10, 1).unwrap();
    let c = gaussian_matrix(10, 50, 2).unwrap();
    let x = u.matmul(&c).unwrap();
    let basis = svd_basis(&x, 10).unwrap();
    let plan = qr_pivots(&basis, 10).unwrap();
    let xhat = reconstruct(&basis, &plan, &measure(&x, &plan).unwrap()).unwrap();
    let err = fractional_error(&x, &xhat).unwrap();
    assert!(err <= 1e-8, "error {err}");
}

#[test]
fn noiseless_oversampled_low_rank_trial_is_near_exact() {
    let ds = synthesize(&SpectrumSpec::new(50.0, -1.0, 8).unwrap(), 60, 90, 4).unwrap();
    let config = ExperimentConfig {
        noise_cheap: 0.0,
        noise_exp: 0.0,
        counts: counts(2, 2, 1),
        ..ExperimentConfig::default()
    };
    for split in 0..2 {
        let idx = TrialIndex { split, cv: 1, noise: 0 };
        let err = run_trial(&ds, &config, idx, &Cell::Modes { r: 8, p: 16 }).unwrap();
        assert!(err <= 1e-6, "split {split}: {err}");
    }
}

#[test]
fn trials_are_deterministic_and_noise_index_matters() {
    let ds = small_dataset(-1.1, 3);
    let config = ExperimentConfig {
        counts: counts(2, 2, 2),
        ..ExperimentConfig::default()
    };
    let cell = Cell::Modes { r: 6, p: 12 };
    let a = TrialIndex { split: 1, cv: 0, noise: 0 };
    let b = TrialIndex { noise: 1, ..a };
    let first = run_trial(&ds, &config, a, &cell).unwrap();
    assert_eq!(first.to_bits(), run_trial(&ds, &config, a, &cell).unwrap().to_bits());
    assert_ne!(first, run_trial(&ds, &config, b, &cell).unwrap());
}

#[test]
fn sweep_cell_equals_direct_trial_average() {
    let ds = small_dataset(-1.1, 5);
    let config = ExperimentConfig {
        counts: counts(3, 2, 2),
        master_seed: 19,
        ..ExperimentConfig::default()
    };
    let grid = sweep_modes_sensors(&ds, &config, &[5], &[9]).unwrap();
    let mut errors = Vec::new();
    for split in 0..3 {
        for cv in 0..2 {
            for noise in 0..2 {
                let idx = TrialIndex { split, cv, noise };
                errors.push(run_trial(&ds, &config, idx, &Cell::Modes { r: 5, p: 9 }).unwrap());
            }
        }
    }
    let direct = CellStats::from_errors(&errors);
    assert_eq!(grid.cells[0].stats, direct);
    assert_eq!(direct.trials, 12);
}

#[test]
fn results_do_not_depend_on_thread_count() {
    let ds = small_dataset(-0.8, 6);
    let config = ExperimentConfig {
        counts: counts(3, 3, 2),
        ..ExperimentConfig::default()
    };
    let cells = [Cell::Modes { r: 4, p: 4 }, Cell::Modes { r: 4, p: 10 }, Cell::Modes { r: 9, p: 5 }];
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| run_cells(&ds, &config, &cells).unwrap())
    };
    assert_eq!(run(1), run(4));
}

#[test]
fn all_cheap_endpoint_equals_single_fidelity_cell() {
    let ds = small_dataset(-1.1, 7);
    let budget = budget_from_endpoints(30, 3, 1.0).unwrap();
    let config = ExperimentConfig {
        budget: Some(budget),
        composition_steps: 3,
        counts: counts(2, 2, 2),
        ..ExperimentConfig::default()
    };
    let mf = mf_sweep(&ds, &config).unwrap();
    let Cell::Composition(first) = mf.cells[0].cell else { panic!() };
    assert_eq!((first.p_cheap, first.p_exp), (30, 0));
    let r = config.policy.mode_rule.modes_for(30);
    let single = run_cells(&ds, &config, &[Cell::Modes { r, p: 30 }]).unwrap();
    assert_eq!(mf.cells[0].stats, single[0]);
}

#[test]
fn equal_noise_levels_make_fixed_size_mixes_indistinguishable() {
    let ds = small_dataset(-1.1, 8);
    let config = ExperimentConfig {
        noise_cheap: 0.05,
        noise_exp: 0.05,
        counts: counts(4, 4, 3),
        ..ExperimentConfig::default()
    };
    let comp = |p_cheap, p_exp, assignment| {
        Cell::Composition(sparsesense::multifidelity::Composition {
            p_cheap,
            p_exp,
            assignment,
        })
    };
    let stats = run_cells(
        &ds,
        &config,
        &[comp(20, 0, Assignment::ExpFirst), comp(10, 10, Assignment::ExpFirst), comp(5, 15, Assignment::ExpLast)],
    )
    .unwrap();
    for other in &stats[1..] {
        assert!((other.mean - stats[0].mean).abs() <= 2.0 * pooled_standard_error(other, &stats[0]));
    }
}

#[test]
fn noiseless_error_does_not_grow_with_sensors() {
    let ds = small_dataset(-1.1, 9);
    let config = ExperimentConfig {
        noise_cheap: 0.0,
        noise_exp: 0.0,
        budget: Some(budget_from_endpoints(60, 20, 1.0).unwrap()),
        composition_steps: 5,
        counts: counts(2, 2, 1),
        ..ExperimentConfig::default()
    };
    let mf = mf_sweep(&ds, &config).unwrap();
    let mut rows: Vec<(usize, f64)> = mf
        .cells
        .iter()
        .map(|c| match c.cell {
            Cell::Composition(k) => (k.total(), c.stats.mean),
            _ => unreachable!(),
        })
        .collect();
    rows.sort_by_key(|r| r.0);
    for w in rows.windows(2) {
        assert!(w[1].1 <= w[0].1 * (1.0 + 1e-9), "{rows:?}");
    }
}

#[test]
fn triangle_bound_on_reconstruction() {
    let x = gaussian_matrix(30, 12, 10).unwrap();
    let y = gaussian_matrix(30, 12, 11).unwrap();
    let z = gaussian_matrix(30, 12, 12).unwrap();
    let nx = x.frobenius_norm();
    let exy = fractional_error(&x, &y).unwrap();
    let eyz_scaled = y.sub(&z).unwrap().frobenius_norm() / nx;
    assert!(fractional_error(&x, &z).unwrap() <= exy + eyz_scaled + 1e-15);
}

#[test]
fn randomized_grid_runs() {
    let ds = small_dataset(-1.1, 13);
    let config = ExperimentConfig {
        basis: BasisKind::Randomized,
        counts: counts(2, 2, 1),
        ..ExperimentConfig::default()
    };
    let grid = sweep_modes_sensors(&ds, &config, &[10, 20], &[5, 20, 40]).unwrap();
    assert_eq!(grid.cells.len(), 6);
    assert!(grid.cells.iter().all(|c| c.stats.mean.is_finite()));
}

fn plan_of(locations: Vec<usize>) -> SensorPlan {
    SensorPlan {
        locations,
        method: sparsesense::placement::PlacementMethod::Qr,
        r_used: 1,
    }
}

proptest! {
    #[test]
    fn compositions_are_feasible_with_right_noise_counts(
        p_cheap_max in 1usize..300,
        p_exp_max in 1usize..50,
        cost_cheap in 0.1f64..10.0,
        steps in 2usize..30,
        exp_last in any::<bool>(),
    ) {
        let budget = budget_from_endpoints(p_cheap_max, p_exp_max, cost_cheap).unwrap();
        let assignment = if exp_last { Assignment::ExpLast } else { Assignment::ExpFirst };
        let comps = enumerate_compositions(&budget, steps, assignment).unwrap();
        prop_assert_eq!((comps[0].p_cheap, comps[0].p_exp), (p_cheap_max, 0));
        let last = comps.last().unwrap();
        prop_assert_eq!((last.p_cheap, last.p_exp), (0, p_exp_max));
        let noise = NoiseModel::new(0.04, 0.01, 2.0).unwrap();
        for c in &comps {
            let spend = c.p_cheap as f64 * budget.cost_cheap + c.p_exp as f64 * budget.cost_exp;
            prop_assert!(spend <= budget.budget * (1.0 + 1e-12));
            if c.total() == 0 {
                continue;
            }
            let sig = assign_fidelities(&plan_of((0..c.total()).collect()), c, &noise).unwrap();
            let n_exp = sig.iter().filter(|&&s| s == noise.sigma_exp()).count();
            prop_assert_eq!(n_exp, c.p_exp);
        }
    }

    #[test]
    fn arbitrary_budgets_stay_feasible(cc in 0.01f64..5.0, ce in 0.01f64..50.0, b in 0.0f64..500.0, steps in 2usize..20) {
        let budget = BudgetSpec::new(cc, ce, b).unwrap();
        for c in enumerate_compositions(&budget, steps, Assignment::ExpFirst).unwrap() {
            prop_assert!(budget.is_feasible(c.p_cheap, c.p_exp));
        }
    }

    #[test]
    fn fractional_error_scale_invariant(seed in any::<u64>(), scale in 1e-3f64..1e3) {
        let x = gaussian_matrix(6, 4, seed).unwrap();
        let y = gaussian_matrix(6, 4, seed ^ 0xff).unwrap();
        let e1 = fractional_error(&x, &y).unwrap();
        let e2 = fractional_error(&x.scaled(scale), &y.scaled(scale)).unwrap();
        prop_assert!((e1 - e2).abs() <= 1e-12 * e1.max(1.0));
    }
}

#[test]
fn reconstruction_with_identity_basis_returns_measurements() {
    let psi = DenseMatrix::identity(4).unwrap();
    let basis = sparsesense::basis::Basis {
        psi,
        kind: BasisKind::Svd,
        seed: None,
    };
    let plan = plan_of(vec![2, 0, 3, 1]);
    let x = gaussian_matrix(4, 3, 3).unwrap();
    let xhat = reconstruct(&basis, &plan, &measure(&x, &plan).unwrap()).unwrap();
    assert!(fractional_error(&x, &xhat).unwrap() <= 1e-14);
}
