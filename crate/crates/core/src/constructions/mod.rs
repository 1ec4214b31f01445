//! Explicit groups: PSL₂ representations, higher Schottky groups, Klein
//! combinations and the cone example.

pub mod cone;
pub mod klein;
pub mod mobius;
pub mod reps;
pub mod schottky;

pub use cone::{cone_example, ConeExample};
pub use klein::{klein_combine, KleinCombination, KleinCombinationConfig};
pub use mobius::{mobius_fixed_points, FixedPoints, Mobius, MobiusClass, MobiusGroup, P1Point};
pub use reps::{segre_rep, tangent_line, twisted_cubic_rep, Representation};
pub use schottky::schottky_group;
