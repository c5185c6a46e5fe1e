use proptest::prelude::*;
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sparsesense::basis::{randomized_basis, svd_basis, Basis};
use sparsesense::linalg::{gaussian_matrix, random_orthonormal_columns, singular_values};
use sparsesense::placement::{
    oversample_odeim_e, oversample_random, place, qr_pivots, PlacementMethod, PlacementPolicy,
};
use sparsesense::DenseMatrix;

fn abs_det(m: &DenseMatrix) -> f64 {
    // Product of singular values; adequate for the small blocks used here.
    singular_values(m).iter().product()
}

fn sigma_min(psi: &DenseMatrix, rows: &[usize]) -> f64 {
    *singular_values(&psi.select_rows(rows).unwrap()).last().unwrap()
}

fn orthonormal_basis(n: usize, r: usize, seed: u64) -> Basis {
    Basis {
        psi: random_orthonormal_columns(n, r, seed).unwrap(),
        kind: sparsesense::basis::BasisKind::Svd,
        seed: None,
    }
}

#[test]
fn pivots_beat_median_random_selection() {
    let basis = orthonormal_basis(50, 5, 31);
    let plan = qr_pivots(&basis, 5).unwrap();
    let greedy = abs_det(&basis.psi.select_rows(&plan.locations).unwrap());

    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut dets: Vec<f64> = (0..500)
        .map(|_| {
            let rows = sample(&mut rng, 50, 5).into_vec();
            abs_det(&basis.psi.select_rows(&rows).unwrap())
        })
        .collect();
    dets.sort_by(f64::total_cmp);
    assert!(greedy >= dets[250], "greedy {greedy} vs median {}", dets[250]);
}

#[test]
fn square_plan_determinant_is_pivot_product() {
    let x = gaussian_matrix(40, 30, 8).unwrap();
    let basis = svd_basis(&x, 6).unwrap();
    let plan = qr_pivots(&basis, 6).unwrap();
    let res = sparsesense::linalg::cpqr(&basis.psi.transpose(), 6).unwrap();
    let det = abs_det(&basis.psi.select_rows(&plan.locations).unwrap());
    let prod: f64 = res.r_diag.iter().product();
    assert!(((det - prod) / prod).abs() <= 1e-10);
}

/// Independent greedy: recompute sigma_min for every candidate from scratch.
fn odeim_oracle(psi: &DenseMatrix, p: usize) -> Vec<usize> {
    let (n, r) = psi.shape();
    let res = sparsesense::linalg::cpqr(&psi.transpose(), r).unwrap();
    let mut chosen = res.pivots.clone();
    while chosen.len() < p {
        let mut best = (usize::MAX, f64::NEG_INFINITY);
        for cand in 0..n {
            if chosen.contains(&cand) {
                continue;
            }
            let mut rows = chosen.clone();
            rows.push(cand);
            let s = sigma_min(psi, &rows);
            if s > best.1 {
                best = (cand, s);
            }
        }
        chosen.push(best.0);
    }
    chosen
}

#[test]
fn odeim_matches_exhaustive_oracle() {
    for (n, r, p, seed) in [(30, 3, 8, 1), (50, 5, 12, 2), (20, 4, 20, 3), (45, 1, 6, 4)] {
        let basis = orthonormal_basis(n, r, seed);
        let plan = oversample_odeim_e(&basis, p).unwrap();
        assert_eq!(plan.locations, odeim_oracle(&basis.psi, p), "n={n} r={r} p={p}");
        assert_eq!(plan.method, PlacementMethod::QrOdeimE);
    }
}

#[test]
fn odeim_beats_random_oversampling_mostly() {
    let mut wins = 0;
    let trials = 25;
    for t in 0..trials {
        let basis = orthonormal_basis(200, 10, 900 + t);
        let odeim = oversample_odeim_e(&basis, 20).unwrap();
        let random = oversample_random(&basis, 20, 77 + t).unwrap();
        if sigma_min(&basis.psi, &odeim.locations) >= sigma_min(&basis.psi, &random.locations) {
            wins += 1;
        }
    }
    assert!(wins as f64 >= 0.8 * trials as f64, "odeim won {wins}/{trials}");
}

#[test]
fn random_oversampling_keeps_pivot_prefix() {
    let basis = orthonormal_basis(60, 7, 5);
    let pivots = qr_pivots(&basis, 7).unwrap().locations;
    for seed in 0..5 {
        let plan = oversample_random(&basis, 19, seed).unwrap();
        assert_eq!(&plan.locations[..7], &pivots[..]);
    }
    let a = oversample_random(&basis, 19, 1).unwrap();
    let b = oversample_random(&basis, 19, 2).unwrap();
    assert_ne!(a.locations, b.locations);
}

#[test]
fn randomized_undersampling_uses_full_basis_pivots() {
    let x = gaussian_matrix(40, 30, 2).unwrap();
    let basis = randomized_basis(&x, 25, 6).unwrap();
    let policy = PlacementPolicy::default();
    let plan = place(&basis, 12, &policy, 0).unwrap();
    assert_eq!(plan.locations, qr_pivots(&basis, 12).unwrap().locations);
    assert_eq!(plan.r_used, 25);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn plans_are_distinct_and_sized(
        n in 12usize..60,
        r in 1usize..8,
        extra in 0usize..10,
        seed in any::<u64>(),
        odeim in any::<bool>(),
    ) {
        let basis = orthonormal_basis(n, r, seed);
        let p = (r + extra).min(n);
        let plan = if p == r {
            qr_pivots(&basis, p).unwrap()
        } else if odeim {
            oversample_odeim_e(&basis, p).unwrap()
        } else {
            oversample_random(&basis, p, seed ^ 1).unwrap()
        };
        prop_assert_eq!(plan.len(), p);
        let mut seen = vec![false; n];
        for &i in &plan.locations {
            prop_assert!(i < n && !seen[i]);
            seen[i] = true;
        }
    }
}
