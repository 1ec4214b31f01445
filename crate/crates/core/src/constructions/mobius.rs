//! PSL₂(ℂ) utilities: normalized Möbius maps, fixed points and
//! classification.

use std::fmt;

use crate::error::{Error, Result};
use crate::group::Word;
use crate::linalg::{C64, ONE, ZERO};

/// Point of ℙ¹.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum P1Point {
    Finite(C64),
    Infinity,
}

impl P1Point {
    /// Homogeneous coordinates [s : 1] or [1 : 0].
    pub fn homogeneous(self) -> (C64, C64) {
        match self {
            P1Point::Finite(s) => (s, ONE),
            P1Point::Infinity => (ONE, ZERO),
        }
    }

    pub fn from_homogeneous(x: C64, y: C64) -> Self {
        if y.norm() <= 1e-300 || (x.norm() > 0.0 && y.norm() <= 1e-15 * x.norm()) {
            P1Point::Infinity
        } else {
            P1Point::Finite(x / y)
        }
    }

    /// Chordal distance on the Riemann sphere (in [0, 1]).
    pub fn chordal(self, other: P1Point) -> f64 {
        let (a0, a1) = self.homogeneous();
        let (b0, b1) = other.homogeneous();
        let cross = (a0 * b1 - a1 * b0).norm();
        let na = (a0.norm_sqr() + a1.norm_sqr()).sqrt();
        let nb = (b0.norm_sqr() + b1.norm_sqr()).sqrt();
        cross / (na * nb)
    }
}

impl fmt::Display for P1Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            P1Point::Finite(s) => write!(f, "{s}"),
            P1Point::Infinity => write!(f, "∞"),
        }
    }
}

/// z ↦ (az + b)/(cz + d) with ad − bc = 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mobius {
    pub a: C64,
    pub b: C64,
    pub c: C64,
    pub d: C64,
}

impl Mobius {
    /// Divides by a square root of ad − bc.
    pub fn new(a: C64, b: C64, c: C64, d: C64) -> Result<Self> {
        let det = a * d - b * c;
        let scale = [a, b, c, d].iter().map(|x| x.norm()).fold(0.0, f64::max);
        if !(det.norm() > 1e-14 * scale * scale) {
            return Err(Error::NotAGroupElement { det_abs: det.norm() });
        }
        let s = det.sqrt();
        Ok(Self { a: a / s, b: b / s, c: c / s, d: d / s })
    }

    pub fn identity() -> Self {
        Self { a: ONE, b: ZERO, c: ZERO, d: ONE }
    }

    /// self ∘ other.
    pub fn compose(&self, other: &Mobius) -> Mobius {
        Mobius {
            a: self.a * other.a + self.b * other.c,
            b: self.a * other.b + self.b * other.d,
            c: self.c * other.a + self.d * other.c,
            d: self.c * other.b + self.d * other.d,
        }
    }

    pub fn inverse(&self) -> Mobius {
        Mobius { a: self.d, b: -self.b, c: -self.c, d: self.a }
    }

    pub fn trace(&self) -> C64 {
        self.a + self.d
    }

    pub fn det(&self) -> C64 {
        self.a * self.d - self.b * self.c
    }

    pub fn apply(&self, p: P1Point) -> P1Point {
        let (x, y) = p.homogeneous();
        P1Point::from_homogeneous(self.a * x + self.b * y, self.c * x + self.d * y)
    }

    /// |g'| at a point, with the derivative at ∞ taken in the chart 1/z.
    pub fn multiplier_modulus(&self, p: P1Point) -> f64 {
        match p {
            P1Point::Finite(z) => 1.0 / (self.c * z + self.d).norm_sqr(),
            P1Point::Infinity => (self.d / self.a).norm(),
        }
    }

    /// Equal to ±identity.
    pub fn is_identity(&self, tol: f64) -> bool {
        let scale = [self.a, self.b, self.c, self.d].iter().map(|x| x.norm()).fold(0.0, f64::max);
        self.b.norm() <= tol * scale && self.c.norm() <= tol * scale && (self.a - self.d).norm() <= tol * scale
    }
}

/// Finitely generated subgroup of PSL₂(ℂ) with named generators.
#[derive(Debug, Clone, PartialEq)]
pub struct MobiusGroup {
    pub names: Vec<String>,
    pub generators: Vec<Mobius>,
}

impl MobiusGroup {
    pub fn new(generators: Vec<(String, Mobius)>) -> Self {
        let (names, generators) = generators.into_iter().unzip();
        Self { names, generators }
    }

    pub fn evaluate(&self, word: &Word) -> Mobius {
        word.letters().iter().fold(Mobius::identity(), |acc, l| {
            let g = self.generators[l.generator];
            acc.compose(&if l.inverse { g.inverse() } else { g })
        })
    }
}

/// Circle pairing z ↦ c′ + r r′/(z − c): the outside of |z − c| = r goes to
/// the inside of |z − c′| = r′.
pub fn circle_pairing(center: C64, radius: f64, image_center: C64, image_radius: f64) -> Result<Mobius> {
    if !(radius > 0.0 && image_radius > 0.0) {
        return Err(Error::InvalidSchottky("radii must be positive".into()));
    }
    let rr = C64::new(radius * image_radius, 0.0);
    Mobius::new(image_center, rr - center * image_center, ONE, -center)
}

/// Classical Schottky group pairing circle 2k with circle 2k+1. The circles
/// must be pairwise disjoint.
pub fn classical_schottky(circles: &[(C64, f64)]) -> Result<MobiusGroup> {
    if circles.is_empty() || !circles.len().is_multiple_of(2) {
        return Err(Error::InvalidSchottky("need a positive even number of circles".into()));
    }
    for (i, &(ci, ri)) in circles.iter().enumerate() {
        for &(cj, rj) in &circles[i + 1..] {
            if (ci - cj).norm() <= ri + rj {
                return Err(Error::InvalidSchottky(format!(
                    "circles at {ci} and {cj} are not disjoint"
                )));
            }
        }
    }
    let gens = circles
        .chunks(2)
        .enumerate()
        .map(|(k, pair)| {
            let g = circle_pairing(pair[0].0, pair[0].1, pair[1].0, pair[1].1)?;
            Ok((format!("g{k}"), g))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(MobiusGroup::new(gens))
}

/// Two generators pairing the unit circles at ∓d and at ∓di.
pub fn default_classical_schottky(d: f64) -> Result<MobiusGroup> {
    let circles = [
        (C64::new(-d, 0.0), 1.0),
        (C64::new(d, 0.0), 1.0),
        (C64::new(0.0, -d), 1.0),
        (C64::new(0.0, d), 1.0),
    ];
    classical_schottky(&circles)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MobiusClass {
    Loxodromic,
    Parabolic,
    Elliptic,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedPoints {
    pub attracting: P1Point,
    pub repelling: P1Point,
    pub class: MobiusClass,
}

const CLASS_TOL: f64 = 1e-10;

/// Fixed points as the roots of cz² + (d − a)z − b = 0, ordered by
/// multiplier. Parabolic maps report their single fixed point twice;
/// elliptic maps have no attracting point and report the roots in order.
pub fn mobius_fixed_points(g: &Mobius) -> Result<FixedPoints> {
    if g.is_identity(1e-14) {
        return Err(Error::Usage("the identity has no isolated fixed points".into()));
    }
    let tr2 = g.trace() * g.trace();
    let class = if (tr2 - 4.0).norm() <= CLASS_TOL * tr2.norm().max(1.0) {
        MobiusClass::Parabolic
    } else if tr2.im.abs() <= CLASS_TOL * tr2.norm().max(1.0) && tr2.re >= 0.0 && tr2.re < 4.0 {
        MobiusClass::Elliptic
    } else {
        MobiusClass::Loxodromic
    };
    let scale = [g.a, g.b, g.c, g.d].iter().map(|x| x.norm()).fold(0.0, f64::max);
    let (p, q) = if g.c.norm() <= 1e-14 * scale {
        // z ↦ (az + b)/d fixes ∞ and, unless a = d, b/(d − a).
        let finite = if (g.d - g.a).norm() <= 1e-14 * scale {
            P1Point::Infinity
        } else {
            P1Point::Finite(g.b / (g.d - g.a))
        };
        (P1Point::Infinity, finite)
    } else {
        let disc = (tr2 - 4.0).sqrt();
        let two_c = g.c * 2.0;
        (
            P1Point::Finite((g.a - g.d + disc) / two_c),
            P1Point::Finite((g.a - g.d - disc) / two_c),
        )
    };
    let (attracting, repelling) = match class {
        MobiusClass::Parabolic => {
            let fixed = if matches!(p, P1Point::Infinity) || matches!(q, P1Point::Infinity) {
                P1Point::Infinity
            } else {
                p
            };
            (fixed, fixed)
        }
        _ if g.multiplier_modulus(p) <= g.multiplier_modulus(q) => (p, q),
        _ => (q, p),
    };
    Ok(FixedPoints { attracting, repelling, class })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;

    #[test]
    fn normalization_gives_unit_determinant() {
        let g = Mobius::new(c(2.0, 1.0), c(0.5, 0.0), c(-1.0, 3.0), c(4.0, 0.0)).unwrap();
        assert!((g.det() - ONE).norm() < 1e-12);
        assert!(Mobius::new(ONE, ONE, ONE, ONE).is_err());
    }

    #[test]
    fn diagonal_fixed_points() {
        let k = c(2.0, 0.5);
        let g = Mobius::new(k, ZERO, ZERO, k.inv()).unwrap();
        let f = mobius_fixed_points(&g).unwrap();
        assert_eq!(f.class, MobiusClass::Loxodromic);
        assert_eq!(f.attracting, P1Point::Infinity);
        assert_eq!(f.repelling, P1Point::Finite(ZERO));
    }

    #[test]
    fn parabolic_translation() {
        let g = Mobius::new(ONE, ONE, ZERO, ONE).unwrap();
        let f = mobius_fixed_points(&g).unwrap();
        assert_eq!(f.class, MobiusClass::Parabolic);
        assert_eq!(f.attracting, P1Point::Infinity);
        assert_eq!(f.repelling, P1Point::Infinity);
    }

    #[test]
    fn elliptic_rotation() {
        let t = 0.7_f64;
        let g = Mobius::new(c(t.cos(), 0.0), c(-t.sin(), 0.0), c(t.sin(), 0.0), c(t.cos(), 0.0)).unwrap();
        assert_eq!(mobius_fixed_points(&g).unwrap().class, MobiusClass::Elliptic);
    }

    #[test]
    fn circle_pairing_maps_circle_to_circle() {
        let g = circle_pairing(c(-3.0, 0.0), 1.0, c(3.0, 0.0), 0.5).unwrap();
        for k in 0..8 {
            let t = k as f64;
            let z = c(-3.0, 0.0) + c(t.cos(), t.sin());
            match g.apply(P1Point::Finite(z)) {
                P1Point::Finite(w) => assert!(((w - c(3.0, 0.0)).norm() - 0.5).abs() < 1e-12),
                P1Point::Infinity => panic!("circle point sent to ∞"),
            }
        }
        assert!(classical_schottky(&[(ZERO, 1.0), (c(1.5, 0.0), 1.0)]).is_err());
        assert_eq!(default_classical_schottky(3.0).unwrap().generators.len(), 2);
    }

    #[test]
    fn identity_is_rejected() {
        assert!(mobius_fixed_points(&Mobius::identity()).is_err());
    }

    #[test]
    fn attracting_point_attracts() {
        let g = Mobius::new(c(1.0, 2.0), c(0.3, -1.0), c(0.7, 0.2), c(2.0, 0.1)).unwrap();
        let f = mobius_fixed_points(&g).unwrap();
        assert_eq!(f.class, MobiusClass::Loxodromic);
        let mut p = P1Point::Finite(c(0.123, -4.0));
        for _ in 0..5000 {
            p = g.apply(p);
        }
        assert!(p.chordal(f.attracting) < 1e-10);
        assert!(g.apply(f.repelling).chordal(f.repelling) < 1e-12);
    }
}
