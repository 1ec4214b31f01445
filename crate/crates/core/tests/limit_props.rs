mod common;

use kleinian_core::constructions::reps::{segre_rep, twisted_cubic_rep};
use kleinian_core::exterior::q_form;
use kleinian_core::group::ProjectiveMap;
use kleinian_core::limit::limit_nplane_of_powers;
use kleinian_core::planes::plane_distance;
use kleinian_core::Tolerances;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn examples(seed: u64) -> Vec<ProjectiveMap> {
    let tol = Tolerances::default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = common::random_loxodromic(&mut rng, 1.5);
    vec![
        twisted_cubic_rep(&g, &tol).unwrap(),
        segre_rep(&g, 1, &tol).unwrap(),
        common::higher_schottky().generators[0].map.clone(),
    ]
}

fn forward() -> Vec<i64> {
    (1..=120).collect()
}

fn backward() -> Vec<i64> {
    (1..=120).map(|k| -k).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(30))]

    #[test]
    fn limit_planes_lie_on_quadric_and_are_invariant(seed in any::<u64>()) {
        let tol = Tolerances::default();
        for g in examples(seed) {
            let lim = limit_nplane_of_powers(&g, &forward(), &tol).unwrap();
            prop_assert!(lim.residual_on_quadric <= 1e-8);
            let moved = lim.plane.transform(g.rep(), &tol).unwrap();
            prop_assert!(plane_distance(&moved, &lim.plane).unwrap().value() <= 1e-8);
        }
    }

    #[test]
    fn limit_kernel_is_q_orthogonal_to_inverse_image(seed in any::<u64>()) {
        let tol = Tolerances::default();
        for g in examples(seed) {
            let fwd = limit_nplane_of_powers(&g, &forward(), &tol).unwrap().limit;
            let back = limit_nplane_of_powers(&g, &backward(), &tol).unwrap().limit;
            prop_assert_eq!(fwd.kernel_basis.ncols() + 1, fwd.limit_matrix.nrows());
            let image = back.image_basis.column(0).into_owned();
            for k in fwd.kernel_basis.column_iter() {
                let v = q_form(&k.into_owned(), &image).unwrap().norm();
                prop_assert!(v <= 1e-7, "{v}");
            }
        }
    }
}
