//! Cyclic groups generated by diag(A, B) with every eigenvalue of A
//! strictly smaller in modulus than every eigenvalue of B.

use crate::error::{Error, Result};
use crate::group::{GroupSpec, Structure};
use crate::linalg::{self, CMatrix};
use crate::tol::Tolerances;

const EIGEN_MARGIN: f64 = 1e-9;

/// Moduli of the eigenvalues, from the complex Schur form.
pub fn eigenvalue_moduli(m: &CMatrix) -> Result<Vec<f64>> {
    let schur = m
        .clone()
        .try_schur(f64::EPSILON, 10_000)
        .ok_or_else(|| Error::InvalidSchottky("Schur decomposition did not converge".into()))?;
    let (_, t) = schur.unpack();
    Ok(t.diagonal().iter().map(|z| z.norm()).collect())
}

/// τ = [[I, I], [−I, I]]: w′ = z′ + z″, w″ = −z′ + z″.
pub fn tau_frame(n: usize) -> CMatrix {
    let i = linalg::identity(n + 1);
    linalg::from_blocks(&i, &i, &(-&i), &i)
}

/// σ = [[0, I], [I, 0]].
pub fn swap_frame(n: usize) -> CMatrix {
    let i = linalg::identity(n + 1);
    let z = CMatrix::zeros(n + 1, n + 1);
    linalg::from_blocks(&z, &i, &i, &z)
}

/// Cyclic group ⟨diag(A, B)⟩ carrying the frame τ.
pub fn schottky_group(a: &CMatrix, b: &CMatrix, tol: &Tolerances) -> Result<GroupSpec> {
    let m = a.nrows();
    if m < 2 || a.shape() != (m, m) || b.shape() != (m, m) {
        return Err(Error::Usage(format!(
            "A and B must be square of the same size ≥ 2, got {:?} and {:?}",
            a.shape(),
            b.shape()
        )));
    }
    let alpha = eigenvalue_moduli(a)?.into_iter().fold(0.0, f64::max);
    let beta = eigenvalue_moduli(b)?.into_iter().fold(f64::INFINITY, f64::min);
    if !(alpha < beta - EIGEN_MARGIN) {
        return Err(Error::InvalidSchottky(format!(
            "max |eigenvalue of A| = {alpha} is not below min |eigenvalue of B| = {beta}"
        )));
    }
    let g = linalg::block_diag(a, b);
    let n = m - 1;
    GroupSpec::new(n, vec![("g".into(), g)], Structure::Cyclic, tol)?.with_frame(tau_frame(n))
}
