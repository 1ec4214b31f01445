//! Example groups shared by the integration tests.
#![allow(dead_code)]

use kleinian_core::constructions::cone::cone_example;
use kleinian_core::constructions::klein::{klein_combine, KleinCombination, KrOptions};
use kleinian_core::constructions::mobius::{default_classical_schottky, MobiusGroup};
use kleinian_core::constructions::reps::{represent, Representation};
use kleinian_core::constructions::schottky::schottky_group;
use kleinian_core::group::GroupSpec;
use kleinian_core::linalg::{c, CMatrix, CVector};
use kleinian_core::Tolerances;

pub fn diag(v: &[f64]) -> CMatrix {
    CMatrix::from_diagonal(&CVector::from_iterator(v.len(), v.iter().map(|&x| c(x, 0.0))))
}

pub fn classical() -> MobiusGroup {
    default_classical_schottky(3.0).unwrap()
}

pub fn twisted_cubic_schottky() -> GroupSpec {
    represent(&classical(), Representation::TwistedCubic, &Tolerances::default()).unwrap()
}

pub fn segre_schottky() -> GroupSpec {
    represent(&classical(), Representation::Segre, &Tolerances::default()).unwrap()
}

pub fn higher_schottky() -> GroupSpec {
    schottky_group(&diag(&[0.5, 1.0 / 3.0]), &diag(&[2.0, 3.0]), &Tolerances::default()).unwrap()
}

pub fn klein() -> KleinCombination {
    let tol = Tolerances::default();
    let f1 = schottky_group(&diag(&[0.5, 0.5]), &diag(&[2.0, 2.0]), &tol).unwrap();
    let f2 = schottky_group(&diag(&[1.0 / 3.0, 0.25]), &diag(&[3.0, 4.0]), &tol).unwrap();
    klein_combine(&f1, &f2, 0.1, 6, &KrOptions::default(), &tol).unwrap()
}

pub fn cone() -> GroupSpec {
    cone_example(c(2.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), &Tolerances::default())
        .unwrap()
        .spec
}

/// Every example group with a frame in which its C blocks are invertible.
pub fn examples() -> Vec<(&'static str, GroupSpec)> {
    vec![
        ("twisted-cubic", twisted_cubic_schottky()),
        ("segre", segre_schottky()),
        ("schottky", higher_schottky()),
        ("klein", klein().spec),
        ("cone", cone()),
    ]
}

use kleinian_core::constructions::mobius::Mobius;
use kleinian_core::group::{Letter, Word};
use kleinian_core::linalg::random_complex;
use rand::Rng;

/// Random element of SL₂(ℂ) whose larger eigenvalue has modulus ≥ `min_k`.
pub fn random_loxodromic(rng: &mut impl Rng, min_k: f64) -> Mobius {
    loop {
        let Ok(g) = Mobius::new(random_complex(rng), random_complex(rng), random_complex(rng), random_complex(rng))
        else {
            continue;
        };
        let tr = g.trace();
        let disc = (tr * tr - 4.0).sqrt();
        let k = ((tr + disc) / 2.0).norm().max(((tr - disc) / 2.0).norm());
        if k >= min_k && k <= 10.0 {
            return g;
        }
    }
}

/// Random reduced word with exactly `len` letters.
pub fn random_reduced_word(rng: &mut impl Rng, generators: usize, len: usize) -> Word {
    let mut letters: Vec<Letter> = Vec::with_capacity(len);
    while letters.len() < len {
        let l = Letter::new(rng.random_range(0..generators), rng.random_bool(0.5));
        if letters.last().is_none_or(|p| *p != l.inv()) {
            letters.push(l);
        }
    }
    Word(letters)
}
