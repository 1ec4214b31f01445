//! Small dense complex linear-algebra helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

/// Entries within this relative distance of the largest modulus tie for the
/// phase-fixing pivot; the first one in storage order wins.
const PIVOT_TIE: f64 = 1e-12;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn max_abs<'a>(entries: impl IntoIterator<Item = &'a C64>) -> f64 {
    entries.into_iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

/// Index of the phase pivot: the first entry whose modulus is within
/// `PIVOT_TIE` of the maximum.
fn pivot_index(entries: &[C64]) -> Option<(usize, f64)> {
    let max = max_abs(entries);
    if !(max > 0.0) || !max.is_finite() {
        return None;
    }
    let cut = max * (1.0 - PIVOT_TIE);
    entries
        .iter()
        .position(|z| z.norm() >= cut)
        .map(|i| (i, max))
}

/// Scales `entries` in place so the pivot entry is real positive with modulus 1.
/// Returns the modulus that was divided out, or `None` for a zero/non-finite input.
fn normalize_slice(entries: &mut [C64]) -> Option<f64> {
    let (i, max) = pivot_index(entries)?;
    let phase = entries[i] / entries[i].norm();
    let factor = phase.conj() / max;
    for z in entries.iter_mut() {
        *z *= factor;
    }
    entries[i] = C64::new(entries[i].re, 0.0);
    Some(max)
}

/// Max-modulus / phase normalization of a matrix, without any invertibility check.
pub fn normalize_matrix(m: &CMatrix) -> Option<(CMatrix, f64)> {
    // nalgebra storage is column-major; pivot order follows that layout.
    let mut out = m.clone();
    let scale = normalize_slice(out.as_mut_slice())?;
    Some((out, scale))
}

/// Projective normalization of a vector: largest-modulus entry becomes 1.
pub fn normalize_vector(v: &CVector) -> Option<CVector> {
    let mut out = v.clone();
    normalize_slice(out.as_mut_slice())?;
    Some(out)
}

/// Unit Euclidean norm representative.
pub fn unit(v: &CVector) -> CVector {
    let n = v.norm();
    if n > 0.0 {
        v.unscale(n)
    } else {
        v.clone()
    }
}

/// Hermitian inner product ⟨a, b⟩ = Σ conj(a_i) b_i.
pub fn hdot(a: &CVector, b: &CVector) -> C64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

/// Chordal distance on projective space: min over phases of ‖p − e^{iφ}q‖/√2
/// for unit representatives, which equals √(1 − |⟨p, q⟩|). Evaluated as the
/// phase-aligned difference to avoid cancellation near 0.
pub fn chordal_distance(p: &CVector, q: &CVector) -> f64 {
    let (pn, qn) = (p.norm(), q.norm());
    if pn == 0.0 || qn == 0.0 {
        return f64::NAN;
    }
    let inner = hdot(q, p);
    let phase = if inner.norm() > 0.0 { inner / inner.norm() } else { ONE };
    let diff = p.unscale(pn) - q.unscale(qn) * phase;
    (diff.norm() / std::f64::consts::SQRT_2).min(1.0)
}

/// max-entry difference between `a` and `e^{iφ}b`, with φ chosen to align the
/// two matrices in the Frobenius inner product.
pub fn phase_aligned_max_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    let inner: C64 = b.iter().zip(a.iter()).map(|(x, y)| x.conj() * y).sum();
    let phase = if inner.norm() > 0.0 {
        inner / inner.norm()
    } else {
        ONE
    };
    a.iter()
        .zip(b.iter())
        .fold(0.0, |acc, (x, y)| acc.max((x - y * phase).norm()))
}

pub fn singular_values(m: &CMatrix) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    m.clone().svd(false, false).singular_values.iter().copied().collect()
}

/// Operator 2-norm.
pub fn op_norm(m: &CMatrix) -> f64 {
    singular_values(m).first().copied().unwrap_or(0.0)
}

/// Numerical rank: singular values above `rel_tol·σ_max`.
pub fn numerical_rank(m: &CMatrix, rel_tol: f64) -> usize {
    let s = singular_values(m);
    match s.first() {
        Some(&top) if top > 0.0 => s.iter().filter(|&&x| x > rel_tol * top).count(),
        _ => 0,
    }
}

pub fn det(m: &CMatrix) -> C64 {
    match m.nrows() {
        0 => ONE,
        1 => m[(0, 0)],
        2 => m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)],
        _ => m.clone().lu().determinant(),
    }
}

pub fn inverse(m: &CMatrix) -> Option<CMatrix> {
    m.clone().lu().try_inverse()
}

/// Orthonormal basis of the column space, using the singular-value cutoff
/// `rel_tol`.
pub fn orthonormal_columns(m: &CMatrix, rel_tol: f64) -> CMatrix {
    let svd = m.clone().svd(true, false);
    let top = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let rank = svd
        .singular_values
        .iter()
        .filter(|&&s| top > 0.0 && s > rel_tol * top)
        .count();
    let u = svd.u.expect("requested U");
    // nalgebra sorts singular values in decreasing order.
    u.columns(0, rank).into_owned()
}

/// Orthonormal basis for the right null space, taking the `dim` smallest
/// right singular vectors. Returns the basis and all singular values
/// (padded with zeros up to the column count).
pub fn null_space(m: &CMatrix, dim: usize) -> (CMatrix, Vec<f64>) {
    let cols = m.ncols();
    let padded = if m.nrows() < cols {
        let mut p = CMatrix::zeros(cols, cols);
        p.rows_mut(0, m.nrows()).copy_from(m);
        p
    } else {
        m.clone()
    };
    let svd = padded.svd(false, true);
    let vt = svd.v_t.expect("requested V^H");
    let sv: Vec<f64> = svd.singular_values.iter().copied().collect();
    let mut basis = CMatrix::zeros(cols, dim);
    for k in 0..dim {
        let row = vt.row(cols - dim + k);
        for i in 0..cols {
            basis[(i, k)] = row[i].conj();
        }
    }
    (basis, sv)
}

/// Distance from the projective point `z` to the subspace spanned by the
/// orthonormal columns of `basis`: the sine of the angle, in [0, 1].
pub fn point_subspace_distance(z: &CVector, basis: &CMatrix) -> f64 {
    let zu = unit(z);
    let proj = basis * (basis.adjoint() * &zu);
    (zu - proj).norm().min(1.0)
}

pub fn random_complex(rng: &mut impl Rng) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

pub fn random_matrix(rng: &mut impl Rng, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| random_complex(rng))
}

pub fn random_vector(rng: &mut impl Rng, len: usize) -> CVector {
    CVector::from_fn(len, |_, _| random_complex(rng))
}

/// Uniform sample from the unit sphere of ℂ^len.
pub fn random_unit_vector(rng: &mut impl Rng, len: usize) -> CVector {
    loop {
        let v = random_vector(rng, len);
        let n = v.norm();
        if n > 1e-12 {
            return v.unscale(n);
        }
    }
}

/// Haar-ish unitary via QR of a Gaussian matrix.
pub fn random_unitary(rng: &mut impl Rng, size: usize) -> CMatrix {
    let qr = random_matrix(rng, size, size).qr();
    let (q, r) = qr.unpack();
    let mut q = q;
    for j in 0..size {
        let d = r[(j, j)];
        if d.norm() > 0.0 {
            let phase = d / d.norm();
            for i in 0..size {
                q[(i, j)] *= phase;
            }
        }
    }
    q
}

/// Block-diagonal matrix diag(a, b).
pub fn block_diag(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (ra, ca) = a.shape();
    let (rb, cb) = b.shape();
    let mut m = CMatrix::zeros(ra + rb, ca + cb);
    m.view_mut((0, 0), (ra, ca)).copy_from(a);
    m.view_mut((ra, ca), (rb, cb)).copy_from(b);
    m
}

/// Matrix [[a, b], [c, d]] from four equally sized square blocks.
pub fn from_blocks(a: &CMatrix, b: &CMatrix, c_: &CMatrix, d: &CMatrix) -> CMatrix {
    let k = a.nrows();
    let mut m = CMatrix::zeros(2 * k, 2 * k);
    m.view_mut((0, 0), (k, k)).copy_from(a);
    m.view_mut((0, k), (k, k)).copy_from(b);
    m.view_mut((k, 0), (k, k)).copy_from(c_);
    m.view_mut((k, k), (k, k)).copy_from(d);
    m
}

pub fn identity(k: usize) -> CMatrix {
    CMatrix::identity(k, k)
}
