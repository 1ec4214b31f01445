//! Numerical thresholds shared by every decision the library makes.
//!
//! All values are relative to a natural scale (a norm, a largest singular
//! value, a determinant) at the call site. Defaults can be overridden one key
//! at a time, which is how the command line exposes them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    /// Residual allowed for algebraic identities (compound, adjugate, cocycle).
    pub identity: f64,
    /// Relative singular-value cutoff for rank and intersection decisions.
    pub rank: f64,
    /// Upper bound on σ₂/σ₁ for a compound limit to count as a single plane.
    pub rank_one_gap: f64,
    /// Final step size below which a normalized sequence counts as converged.
    pub cauchy: f64,
    /// Half-width of the band |μ − 1| treated as the boundary Σ_g.
    pub boundary: f64,
    /// Relative cutoff for invertibility of generators and C blocks.
    pub singular: f64,
    /// Relative cutoff for the denominator of μ_g.
    pub mu_denominator: f64,
    /// Allowed |Q(p, p)| for a normalized Plücker vector.
    pub quadric: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            identity: 1e-9,
            rank: 1e-8,
            rank_one_gap: 1e-6,
            cauchy: 1e-8,
            boundary: 1e-7,
            singular: 1e-12,
            mu_denominator: 1e-14,
            quadric: 1e-8,
        }
    }
}

impl Tolerances {
    pub fn set(&mut self, key: &str, value: f64) -> Result<()> {
        if !(value.is_finite() && value > 0.0) {
            return Err(Error::Usage(format!("tolerance {key} must be positive, got {value}")));
        }
        let slot = match key {
            "identity" => &mut self.identity,
            "rank" => &mut self.rank,
            "rank_one_gap" => &mut self.rank_one_gap,
            "cauchy" => &mut self.cauchy,
            "boundary" => &mut self.boundary,
            "singular" => &mut self.singular,
            "mu_denominator" => &mut self.mu_denominator,
            "quadric" => &mut self.quadric,
            other => return Err(Error::Usage(format!("unknown tolerance key `{other}`"))),
        };
        *slot = value;
        Ok(())
    }

    /// Parses `key=value` pairs separated by commas, e.g. `rank=1e-9,boundary=1e-6`.
    pub fn with_overrides(mut self, spec: &str) -> Result<Self> {
        for item in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (key, value) = item
                .split_once('=')
                .ok_or_else(|| Error::Usage(format!("expected key=value, got `{item}`")))?;
            let value: f64 = value
                .trim()
                .parse()
                .map_err(|_| Error::Usage(format!("bad number in `{item}`")))?;
            self.set(key.trim(), value)?;
        }
        Ok(self)
    }
}
