//! Numerical tools for discrete groups of projective transformations of
//! ℂP^{2n+1} whose limit sets are unions of n-planes.
//!
//! ```
//! use kleinian_core::constructions::mobius::{default_classical_schottky, mobius_fixed_points};
//! use kleinian_core::constructions::reps::{represent, tangent_line_at, Representation};
//! use kleinian_core::limit::limit_nplane_of_powers;
//! use kleinian_core::planes::plane_distance;
//! use kleinian_core::Tolerances;
//!
//! let tol = Tolerances::default();
//! let group = default_classical_schottky(3.0)?;
//! let spec = represent(&group, Representation::TwistedCubic, &tol)?;
//! let exps: Vec<i64> = (1..=64).collect();
//! let limit = limit_nplane_of_powers(&spec.generators[0].map, &exps, &tol)?;
//! let fixed = mobius_fixed_points(&group.generators[0])?;
//! let d = plane_distance(&limit.plane, &tangent_line_at(fixed.attracting))?.value();
//! assert!(d < 1e-6);
//! # Ok::<(), kleinian_core::Error>(())
//! ```

// `!(x > t)` is used on purpose so NaN lands in the rejecting branch.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod constructions;
pub mod error;
pub mod exterior;
pub mod ford;
pub mod group;
pub mod limit;
pub mod linalg;
pub mod planes;
pub mod tol;

pub use error::{Error, Result};
pub use tol::Tolerances;
