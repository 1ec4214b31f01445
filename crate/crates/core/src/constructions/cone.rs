//! The cyclic group on ℂP³ generated by
//! [[α², 0, 0, 0], [0, 1, 0, 0], [0, 0, α⁻², 0], [p, q, r, 1]].

use crate::error::{Error, Result};
use crate::group::{GroupSpec, Structure};
use crate::linalg::{c, CMatrix, C64, ONE, ZERO};
use crate::planes::NPlane;
use crate::tol::Tolerances;

/// Position in lexicographic order (e01, e02, e03, e12, e13, e23) of each
/// element of the order e01, e02, e12, e03, e13, e23 used by the closed form.
const TO_LEX: [usize; 6] = [0, 1, 3, 2, 4, 5];

#[derive(Debug, Clone, PartialEq)]
pub struct ConeExample {
    pub alpha: C64,
    pub p: C64,
    pub q: C64,
    pub r: C64,
    /// Raw generator with the frame below attached.
    pub spec: GroupSpec,
}

pub fn cone_generator(alpha: C64, p: C64, q: C64, r: C64) -> Result<CMatrix> {
    if !(alpha.norm() > 1.0) {
        return Err(Error::Precondition(format!("|alpha| = {} must exceed 1", alpha.norm())));
    }
    let a2 = alpha * alpha;
    Ok(CMatrix::from_row_slice(
        4,
        4,
        &[a2, ZERO, ZERO, ZERO, ZERO, ONE, ZERO, ZERO, ZERO, ZERO, a2.inv(), ZERO, p, q, r, ONE],
    ))
}

/// w₀ = z₀ + z₁ − z₂ − z₃, w₁ = −z₀ + z₁ + z₂ − z₃, w₂ = z₀ − z₁ + z₂ + z₃,
/// w₃ = z₃.
pub fn cone_frame() -> CMatrix {
    let rows: [f64; 16] = [1., 1., -1., -1., -1., 1., 1., -1., 1., -1., 1., 1., 0., 0., 0., 1.];
    CMatrix::from_row_slice(4, 4, &rows.map(|x| c(x, 0.0)))
}

pub fn cone_example(alpha: C64, p: C64, q: C64, r: C64, tol: &Tolerances) -> Result<ConeExample> {
    let g = cone_generator(alpha, p, q, r)?;
    let spec = GroupSpec::new(1, vec![("g".into(), g)], Structure::Cyclic, tol)?.with_frame(cone_frame())?;
    Ok(ConeExample { alpha, p, q, r, spec })
}

impl ConeExample {
    /// Same group without the frame.
    pub fn raw_spec(&self) -> GroupSpec {
        GroupSpec { frame: None, ..self.spec.clone() }
    }

    /// Closed form of the second compound of gᵏ, lexicographic basis.
    pub fn predicted_compound(&self, k: i64) -> CMatrix {
        let a2 = self.alpha * self.alpha;
        let a2k = a2.powi(k as i32);
        let am2k = a2k.inv();
        let a2_inv = a2.inv();
        let kk = c(k as f64, 0.0);
        let (p, q, r) = (self.p, self.q, self.r);
        let rows: [[C64; 6]; 6] = [
            [a2k, ZERO, ZERO, ZERO, ZERO, ZERO],
            [ZERO, ONE, ZERO, ZERO, ZERO, ZERO],
            [ZERO, ZERO, am2k, ZERO, ZERO, ZERO],
            [kk * a2k * q, (ONE - a2k) / (a2_inv - ONE) * r, ZERO, a2k, ZERO, ZERO],
            [-(a2k - ONE) / (a2 - ONE) * p, ZERO, (am2k - ONE) / (a2_inv - ONE) * r, ZERO, ONE, ZERO],
            [ZERO, -(ONE - am2k) / (a2 - ONE) * p, -kk * am2k * q, ZERO, ZERO, am2k],
        ];
        let mut out = CMatrix::zeros(6, 6);
        for i in 0..6 {
            for j in 0..6 {
                out[(TO_LEX[i], TO_LEX[j])] = rows[i][j];
            }
        }
        out
    }

    /// Exponents 2²⁴ … 2³⁶ for power limits. Entries of the normalized
    /// compound converge only like 1/k, so the Cauchy and rank-one tests need
    /// k far beyond what a 4×4 product can reach.
    pub fn limit_exponents() -> Vec<i64> {
        (24..=36).map(|k| 1i64 << k).collect()
    }

    /// Limits of gᵏ as k → +∞ and k → −∞: e₀∧e₃ and e₂∧e₃, when q ≠ 0.
    pub fn predicted_limit_lines(&self) -> Option<(NPlane, NPlane)> {
        if self.q == ZERO {
            return None;
        }
        let plus = NPlane::span_of_axes(1, &[0, 3]).expect("axes in range");
        let minus = NPlane::span_of_axes(1, &[2, 3]).expect("axes in range");
        Some((plus, minus))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::exterior::compound;
    use crate::limit::limit_nplane_of_powers;
    use crate::planes::plane_distance;

    fn ex(q: f64) -> ConeExample {
        cone_example(c(2.0, 0.0), ONE, c(q, 0.0), ONE, &Tolerances::default()).unwrap()
    }

    fn raw_power(g: &CMatrix, k: i64) -> CMatrix {
        let base = if k < 0 { g.clone().try_inverse().unwrap() } else { g.clone() };
        (0..k.unsigned_abs()).fold(CMatrix::identity(4, 4), |acc, _| acc * &base)
    }

    #[test]
    fn closed_form_matches_compound() {
        let e = ex(1.0);
        let g = cone_generator(e.alpha, e.p, e.q, e.r).unwrap();
        for k in -10..=10 {
            let direct = compound(&raw_power(&g, k)).unwrap().entries;
            let predicted = e.predicted_compound(k);
            let scale = direct.camax();
            assert!((direct - predicted).camax() <= 1e-8 * scale, "k = {k}");
        }
    }

    #[test]
    fn small_alpha_is_rejected() {
        let err = cone_example(c(0.5, 0.5), ONE, ONE, ONE, &Tolerances::default()).unwrap_err();
        assert!(matches!(err, Error::Precondition(_)));
    }

    #[test]
    fn limit_lines_when_q_nonzero() {
        let tol = Tolerances::default();
        let e = ex(1.0);
        let g = &e.spec.generators[0].map;
        let (plus, minus) = e.predicted_limit_lines().unwrap();
        let exps = ConeExample::limit_exponents();
        let lp = limit_nplane_of_powers(g, &exps, &tol).unwrap();
        let neg: Vec<i64> = exps.iter().map(|k| -k).collect();
        let lm = limit_nplane_of_powers(g, &neg, &tol).unwrap();
        assert!(plane_distance(&lp.plane, &plus).unwrap().value() < 1e-6);
        assert!(plane_distance(&lm.plane, &minus).unwrap().value() < 1e-6);
    }

    #[test]
    fn no_limit_line_when_q_zero() {
        let tol = Tolerances::default();
        let e = ex(0.0);
        assert!(e.predicted_limit_lines().is_none());
        let exps = ConeExample::limit_exponents();
        let err = limit_nplane_of_powers(&e.spec.generators[0].map, &exps, &tol).unwrap_err();
        assert!(matches!(err, Error::NotALimitPlane { rank } if rank > 1), "{err:?}");
    }
}
