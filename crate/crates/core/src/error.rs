use thiserror::Error;

use crate::group::{Enumeration, Word};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("half-dimension m = {m} outside the supported range 2..=6")]
    DimensionCap { m: usize },

    #[error("usage error: {0}")]
    Usage(String),

    #[error("subspace is degenerate: numerical rank {rank} < {expected}")]
    DegenerateSubspace { rank: usize, expected: usize },

    #[error("vector is not a decomposable m-vector (kernel of wedge map has dimension {found}, expected {expected})")]
    NotDecomposable { found: usize, expected: usize },

    #[error("matrix is not a group element (singular, |det| = {det_abs:e})")]
    NotAGroupElement { det_abs: f64 },

    #[error("C block is singular for word {word}")]
    CSingular { word: Word },

    #[error("word enumeration exceeded the budget of {limit} words")]
    BudgetExceeded {
        limit: usize,
        partial: Box<Enumeration>,
    },

    #[error("limit of the compound sequence has rank {rank}, not a single n-plane")]
    NotALimitPlane { rank: usize },

    #[error("sequence is not numerically Cauchy (last step {last_step:e}); limit undecided")]
    Undecided { last_step: f64 },

    #[error("invalid Schottky data: {0}")]
    InvalidSchottky(String),

    #[error("Klein combination infeasible: {0}")]
    CombinationInfeasible(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("point leaves the affine chart")]
    ChartEscape,
}
