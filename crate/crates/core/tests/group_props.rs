mod common;

use std::collections::HashSet;

use kleinian_core::ford::v_r_estimate;
use kleinian_core::group::{Letter, Word};
use kleinian_core::linalg::phase_aligned_max_diff;
use kleinian_core::Tolerances;
use proptest::prelude::*;

fn word_strategy(generators: usize, max_len: usize) -> impl Strategy<Value = Word> {
    prop::collection::vec((0..generators, any::<bool>()), 0..=max_len)
        .prop_map(|v| Word::identity().concat(&Word(v.into_iter().map(|(g, inv)| Letter::new(g, inv)).collect())))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn evaluation_is_a_homomorphism(w1 in word_strategy(2, 8), w2 in word_strategy(2, 8)) {
        // Cancellation at the junction loses digits in proportion to the
        // condition number, which reaches 1e12 for words of length 2 here.
        prop_assume!(w1.concat(&w2).len() == w1.len() + w2.len());
        // rep() is the max-normalized representative
        let spec = common::twisted_cubic_schottky();
        let product = spec.evaluate(&w1).compose(&spec.evaluate(&w2));
        let direct = spec.evaluate(&w1.concat(&w2));
        let d = phase_aligned_max_diff(product.rep(), direct.rep());
        prop_assert!(d <= 1e-9, "{} · {}: {d}", w1, w2);
    }
}

#[test]
fn enumeration_emits_each_reduced_word_once() {
    for (name, spec) in common::examples() {
        let e = spec.enumerate(4).unwrap();
        let mut seen = HashSet::new();
        for el in &e.elements {
            assert!(el.map.word().is_reduced(), "{name}: {}", el.map.word());
            assert!(seen.insert(el.map.word().clone()), "{name}: duplicate {}", el.map.word());
        }
    }
    // free group on two generators: 1 + 4 + 12 + 36 + 108 words
    assert_eq!(common::twisted_cubic_schottky().enumerate(4).unwrap().len(), 161);
}

#[test]
fn block_bounds_are_finite_for_examples() {
    let tol = Tolerances::default();
    for (name, spec) in common::examples() {
        let est = v_r_estimate(&spec, 4, &tol).unwrap();
        assert!(est.r0.is_finite() && est.rho.is_finite(), "{name}: {est:?}");
        println!("{name}: R0 = {:.4}, rho = {:.4}", est.r0, est.rho);
    }
}
