//! PSL₂(ℂ) acting on ℂP³ through the twisted cubic and through the
//! one-sided Segre action.

use crate::constructions::mobius::{Mobius, MobiusGroup, P1Point};
use crate::error::{Error, Result};
use crate::group::{GroupSpec, ProjectiveMap, Structure};
use crate::linalg::{self, c, CMatrix, CVector, C64, ONE, ZERO};
use crate::planes::NPlane;
use crate::tol::Tolerances;

/// The action on binary cubics, preserving [s³ : s² : s : 1].
pub fn twisted_cubic_matrix(g: &Mobius) -> CMatrix {
    let (a, b, cc, d) = (g.a, g.b, g.c, g.d);
    let two = c(2.0, 0.0);
    let three = c(3.0, 0.0);
    CMatrix::from_row_slice(
        4,
        4,
        &[
            a * a * a,
            three * a * a * b,
            three * a * b * b,
            b * b * b,
            a * a * cc,
            a * a * d + two * a * b * cc,
            two * a * b * d + b * b * cc,
            b * b * d,
            a * cc * cc,
            two * a * cc * d + b * cc * cc,
            a * d * d + two * b * cc * d,
            b * d * d,
            cc * cc * cc,
            three * cc * cc * d,
            three * cc * d * d,
            d * d * d,
        ],
    )
}

/// Fails only when g is so far from the identity that the image is
/// numerically singular.
pub fn twisted_cubic_rep(g: &Mobius, tol: &Tolerances) -> Result<ProjectiveMap> {
    ProjectiveMap::from_matrix(&twisted_cubic_matrix(g), tol)
}

/// τ(s) = [s³ : s² : s : 1], with τ(∞) = e₀.
pub fn twisted_cubic_point(s: P1Point) -> CVector {
    match s {
        P1Point::Finite(s) => CVector::from_vec(vec![s * s * s, s * s, s, ONE]),
        P1Point::Infinity => CVector::from_vec(vec![ONE, ZERO, ZERO, ZERO]),
    }
}

/// Graph matrix L_λ of the tangent line at τ(λ).
pub fn tangent_graph(lambda: C64) -> CMatrix {
    let l2 = lambda * lambda;
    CMatrix::from_row_slice(
        2,
        2,
        &[l2 * 3.0, -l2 * lambda * 2.0, lambda * 2.0, -l2],
    )
}

/// [λ⁴ : 2λ³ : 3λ² : λ² : 2λ : 1] (unnormalized).
pub fn tangent_line_plucker(lambda: C64) -> CVector {
    let l2 = lambda * lambda;
    CVector::from_vec(vec![l2 * l2, l2 * lambda * 2.0, l2 * 3.0, l2, lambda * 2.0, ONE])
}

/// Tangent line to the twisted cubic at τ(λ).
pub fn tangent_line(lambda: C64) -> NPlane {
    tangent_line_at(P1Point::Finite(lambda))
}

/// As [`tangent_line`], with |λ| > 1 and λ = ∞ taken in the chart t = 1/λ
/// where the curve is [1 : t : t² : t³].
pub fn tangent_line_at(lambda: P1Point) -> NPlane {
    let t = match lambda {
        P1Point::Finite(l) if l.norm() <= 1.0 => {
            return NPlane::from_graph(&tangent_graph(l)).expect("2×2 graph");
        }
        P1Point::Finite(l) => l.inv(),
        P1Point::Infinity => ZERO,
    };
    let b = CMatrix::from_column_slice(
        4,
        2,
        &[ONE, t, t * t, t * t * t, ZERO, ONE, t * 2.0, t * t * 3.0],
    );
    NPlane::from_basis(&b, &Tolerances::default()).expect("columns are independent")
}

/// [[aI, bI], [cI, dI]] on ℂ^{2n+2}.
pub fn segre_matrix(g: &Mobius, n: usize) -> CMatrix {
    let i = linalg::identity(n + 1);
    linalg::from_blocks(&(&i * g.a), &(&i * g.b), &(&i * g.c), &(&i * g.d))
}

pub fn segre_rep(g: &Mobius, n: usize, tol: &Tolerances) -> Result<ProjectiveMap> {
    ProjectiveMap::from_matrix(&segre_matrix(g, n), tol)
}

/// {z′ = μ z″}, and {z″ = 0} for μ = ∞.
pub fn segre_limit_line(mu: P1Point, n: usize) -> NPlane {
    match mu {
        P1Point::Finite(mu) => NPlane::from_graph(&(linalg::identity(n + 1) * mu)).expect("square graph"),
        P1Point::Infinity => {
            NPlane::span_of_axes(n, &(0..=n).collect::<Vec<_>>()).expect("axes in range")
        }
    }
}

/// The 6×6 second compound of the twisted cubic matrix, written out as
/// polynomials in a, b, c, d under ad − bc = 1. Basis order is
/// lexicographic: e01, e02, e03, e12, e13, e23.
pub fn printed_size6(g: &Mobius) -> CMatrix {
    let (a, b, cc, d) = (g.a, g.b, g.c, g.d);
    let k = |x: f64| c(x, 0.0);
    let ad_bc = a * d + b * cc;
    let rows = [
        [a.powi(4), k(2.0) * a.powi(3) * b, a * a * b * b, k(3.0) * a * a * b * b, k(2.0) * a * b.powi(3), b.powi(4)],
        [
            k(2.0) * a.powi(3) * cc,
            a * a * (a * d + k(3.0) * b * cc),
            a * b * ad_bc,
            k(3.0) * a * b * ad_bc,
            b * b * (k(3.0) * a * d + b * cc),
            k(2.0) * b.powi(3) * d,
        ],
        [
            k(3.0) * a * a * cc * cc,
            k(3.0) * a * cc * ad_bc,
            a * a * d * d + a * b * cc * d + b * b * cc * cc,
            k(9.0) * a * b * cc * d,
            k(3.0) * b * d * ad_bc,
            k(3.0) * b * b * d * d,
        ],
        [
            a * a * cc * cc,
            a * cc * ad_bc,
            a * b * cc * d,
            a * a * d * d + a * b * cc * d + b * b * cc * cc,
            b * d * ad_bc,
            b * b * d * d,
        ],
        [
            k(2.0) * a * cc.powi(3),
            cc * cc * (k(3.0) * a * d + b * cc),
            cc * d * ad_bc,
            k(3.0) * cc * d * ad_bc,
            d * d * (a * d + k(3.0) * b * cc),
            k(2.0) * b * d.powi(3),
        ],
        [cc.powi(4), k(2.0) * cc.powi(3) * d, cc * cc * d * d, k(3.0) * cc * cc * d * d, k(2.0) * cc * d.powi(3), d.powi(4)],
    ];
    CMatrix::from_fn(6, 6, |i, j| rows[i][j])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Representation {
    TwistedCubic,
    Segre,
}

/// Image of a Möbius group in PGL₄(ℂ).
pub fn represent(group: &MobiusGroup, rep: Representation, tol: &Tolerances) -> Result<GroupSpec> {
    if group.generators.is_empty() {
        return Err(Error::Usage("Möbius group has no generators".into()));
    }
    let gens = group
        .names
        .iter()
        .zip(&group.generators)
        .map(|(name, g)| {
            let m = match rep {
                Representation::TwistedCubic => twisted_cubic_matrix(g),
                Representation::Segre => segre_matrix(g, 1),
            };
            (name.clone(), m)
        })
        .collect();
    let structure = if group.generators.len() == 1 { Structure::Cyclic } else { Structure::Free };
    GroupSpec::new(1, gens, structure, tol)
}
