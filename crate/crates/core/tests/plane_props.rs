use kleinian_core::linalg::{random_matrix, CMatrix};
use kleinian_core::planes::{graph_to_plucker, intersection_value, planes_intersect, NPlane};
use kleinian_core::Tolerances;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Smallest singular value of [B₁ | B₂] relative to the largest.
fn rank_oracle(l1: &NPlane, l2: &NPlane) -> f64 {
    let k = l1.basis().ncols();
    let mut joint = CMatrix::zeros(l1.basis().nrows(), 2 * k);
    joint.view_mut((0, 0), (joint.nrows(), k)).copy_from(l1.basis());
    joint.view_mut((0, k), (joint.nrows(), k)).copy_from(l2.basis());
    let sv = kleinian_core::linalg::singular_values(&joint);
    sv[sv.len() - 1] / sv[0]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn graph_round_trip(seed in any::<u64>(), n in 1usize..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = random_matrix(&mut rng, n + 1, n + 1);
        let back = graph_to_plucker(&x).unwrap().plucker_to_graph().unwrap();
        prop_assert!((back - &x).camax() <= 1e-9 * x.camax().max(1.0));
    }

    #[test]
    fn every_path_lands_on_the_quadric(seed in any::<u64>(), n in 1usize..=3) {
        let tol = Tolerances::default();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let from_basis = NPlane::from_basis(&random_matrix(&mut rng, 2 * n + 2, n + 1), &tol).unwrap();
        let from_graph = graph_to_plucker(&random_matrix(&mut rng, n + 1, n + 1)).unwrap();
        let from_plucker = NPlane::from_plucker(from_basis.plucker(), &tol).unwrap();
        let moved = from_graph.transform(&random_matrix(&mut rng, 2 * n + 2, 2 * n + 2), &tol).unwrap();
        for l in [&from_basis, &from_graph, &from_plucker, &moved] {
            prop_assert!(l.quadric_residual() <= 1e-9);
        }
    }

    #[test]
    fn intersection_is_symmetric(seed in any::<u64>()) {
        let tol = Tolerances::default();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = NPlane::from_basis(&random_matrix(&mut rng, 4, 2), &tol).unwrap();
        let b = NPlane::from_basis(&random_matrix(&mut rng, 4, 2), &tol).unwrap();
        prop_assert_eq!(planes_intersect(&a, &b, &tol).unwrap(), planes_intersect(&b, &a, &tol).unwrap());
    }
}

/// Random pairs, half of them forced to share a vector.
#[test]
fn intersection_agrees_with_rank_oracle() {
    let tol = Tolerances::default();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut disagreements = 0;
    for i in 0..1000 {
        let b1 = random_matrix(&mut rng, 4, 2);
        let mut b2 = random_matrix(&mut rng, 4, 2);
        if i % 2 == 0 {
            b2.set_column(0, &(b1.column(0) * kleinian_core::linalg::random_complex(&mut rng)));
        }
        let l1 = NPlane::from_basis(&b1, &tol).unwrap();
        let l2 = NPlane::from_basis(&b2, &tol).unwrap();
        let q = planes_intersect(&l1, &l2, &tol).unwrap();
        let oracle = rank_oracle(&l1, &l2) <= tol.rank;
        if q != oracle {
            disagreements += 1;
            let v = intersection_value(&l1, &l2).unwrap();
            assert!(v <= 10.0 * tol.rank, "hard disagreement at |Q| = {v}");
        }
    }
    assert!(disagreements <= 1);
}
