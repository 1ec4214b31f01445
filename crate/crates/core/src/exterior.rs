//! Multi-indices, the sign tables δ, compound matrices and the form Q.
//!
//! Coordinates on Λ^m ℂ^{2m} are indexed by the sorted m-subsets of
//! {1,…,2m} in lexicographic order. Entry (K, J) of the compound Â is the
//! minor of A with rows K and columns J, so Â acts on column vectors.

use std::fmt;
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, CVector, C64, ONE, ZERO};

pub const MIN_M: usize = 2;
pub const MAX_M: usize = 6;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex {
    m: usize,
    entries: Vec<usize>,
}

impl MultiIndex {
    /// `entries` are 1-based and must be strictly increasing in `1..=2m`.
    pub fn new(m: usize, entries: Vec<usize>) -> Result<Self> {
        if entries.len() != m {
            return Err(Error::Usage(format!(
                "multi-index {entries:?} must have exactly {m} entries"
            )));
        }
        let ok_range = entries.iter().all(|&e| (1..=2 * m).contains(&e));
        let ok_order = entries.windows(2).all(|w| w[0] < w[1]);
        if !ok_range || !ok_order {
            return Err(Error::Usage(format!(
                "multi-index {entries:?} is not a sorted subset of 1..={}",
                2 * m
            )));
        }
        Ok(Self { m, entries })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn entries(&self) -> &[usize] {
        &self.entries
    }

    /// 0-based positions, convenient for indexing matrices.
    pub fn zero_based(&self) -> impl Iterator<Item = usize> + '_ {
        self.entries.iter().map(|e| e - 1)
    }

    pub fn complement(&self) -> MultiIndex {
        let entries = (1..=2 * self.m)
            .filter(|e| !self.entries.contains(e))
            .collect();
        MultiIndex { m: self.m, entries }
    }

    /// Lexicographic rank among all m-subsets of {1..2m}.
    pub fn position(&self) -> usize {
        let basis = ExteriorBasis::get(self.m).expect("MultiIndex m is always in range");
        basis
            .indices
            .binary_search(self)
            .expect("every valid MultiIndex is enumerated")
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, e) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, "}}")
    }
}

fn check_m(m: usize) -> Result<()> {
    if (MIN_M..=MAX_M).contains(&m) {
        Ok(())
    } else {
        Err(Error::DimensionCap { m })
    }
}

/// All m-subsets of {1..2m} in lexicographic order.
pub fn enumerate_multiindices(m: usize) -> Result<Vec<MultiIndex>> {
    Ok(ExteriorBasis::get(m)?.indices.clone())
}

/// δ_JK: zero when J and K meet, otherwise (−1)^ν with
/// ν = #{(p, q) ∈ J × K : p > q}.
pub fn sign_delta(j: &MultiIndex, k: &MultiIndex) -> Result<i8> {
    if j.m != k.m {
        return Err(Error::Usage(format!(
            "multi-indices {j} and {k} have different sizes"
        )));
    }
    Ok(raw_sign(&j.entries, &k.entries))
}

fn raw_sign(j: &[usize], k: &[usize]) -> i8 {
    let mut inversions = 0usize;
    for p in j {
        for q in k {
            if p == q {
                return 0;
            }
            if p > q {
                inversions += 1;
            }
        }
    }
    if inversions.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// Cached tables for one half-dimension m.
#[derive(Debug)]
pub struct ExteriorBasis {
    pub m: usize,
    pub indices: Vec<MultiIndex>,
    /// Position of the complement J^c for each position J.
    pub complement: Vec<usize>,
    /// δ_{J, J^c} for each position J; the only nonzero entry in row J of δ.
    pub pair_sign: Vec<f64>,
}

impl ExteriorBasis {
    pub fn get(m: usize) -> Result<&'static ExteriorBasis> {
        static CACHE: [OnceLock<ExteriorBasis>; MAX_M + 1] =
            [const { OnceLock::new() }; MAX_M + 1];
        check_m(m)?;
        Ok(CACHE[m].get_or_init(|| ExteriorBasis::build(m)))
    }

    fn build(m: usize) -> Self {
        let mut indices = Vec::new();
        let mut current = Vec::with_capacity(m);
        fn rec(start: usize, top: usize, m: usize, cur: &mut Vec<usize>, out: &mut Vec<MultiIndex>) {
            if cur.len() == m {
                out.push(MultiIndex { m, entries: cur.clone() });
                return;
            }
            for e in start..=top {
                if top - e + 1 < m - cur.len() {
                    break;
                }
                cur.push(e);
                rec(e + 1, top, m, cur, out);
                cur.pop();
            }
        }
        rec(1, 2 * m, m, &mut current, &mut indices);
        let len = indices.len();
        let mut complement = vec![0; len];
        let mut pair_sign = vec![0.0; len];
        for (pos, idx) in indices.iter().enumerate() {
            let comp = idx.complement();
            // Complements reverse the lexicographic order.
            complement[pos] = len - 1 - pos;
            debug_assert_eq!(indices[len - 1 - pos], comp);
            pair_sign[pos] = f64::from(raw_sign(&idx.entries, &comp.entries));
        }
        Self { m, indices, complement, pair_sign }
    }

    /// N + 1 = C(2m, m).
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }
}

/// Half-dimension m such that C(2m, m) = len, if any.
pub fn m_for_plucker_len(len: usize) -> Result<usize> {
    (MIN_M..=MAX_M)
        .find(|&m| binomial(2 * m, m) == len)
        .ok_or_else(|| Error::Usage(format!("length {len} is not C(2m, m) for 2 ≤ m ≤ 6")))
}

pub fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// The bilinear form Q(z, w) = δ_JK z^J w^K for a fixed m.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuadricForm {
    m: usize,
}

impl QuadricForm {
    pub fn new(m: usize) -> Result<Self> {
        check_m(m)?;
        Ok(Self { m })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// δ_{JK} by lexicographic positions.
    pub fn delta(&self, j: usize, k: usize) -> f64 {
        let basis = self.basis();
        if basis.complement[j] == k {
            basis.pair_sign[j]
        } else {
            0.0
        }
    }

    /// Upper-index δ^{JK}; equal to δ_{KJ} (the matrix δ^{..} is the inverse of δ_{..}).
    pub fn delta_upper(&self, j: usize, k: usize) -> f64 {
        self.delta(k, j)
    }

    pub fn eval(&self, z: &CVector, w: &CVector) -> Result<C64> {
        let basis = self.basis();
        if z.len() != basis.len() || w.len() != basis.len() {
            return Err(Error::Usage(format!(
                "Q expects vectors of length {}, got {} and {}",
                basis.len(),
                z.len(),
                w.len()
            )));
        }
        Ok((0..basis.len())
            .map(|j| z[j] * w[basis.complement[j]] * basis.pair_sign[j])
            .sum())
    }

    /// Q as a symmetric-or-skew matrix S with Q(z, w) = zᵀ S w.
    pub fn matrix(&self) -> CMatrix {
        let basis = self.basis();
        let mut s = CMatrix::zeros(basis.len(), basis.len());
        for j in 0..basis.len() {
            s[(j, basis.complement[j])] = C64::new(basis.pair_sign[j], 0.0);
        }
        s
    }

    fn basis(&self) -> &'static ExteriorBasis {
        ExteriorBasis::get(self.m).expect("validated on construction")
    }
}

/// Q(z, w), inferring m from the vector length.
pub fn q_form(z: &CVector, w: &CVector) -> Result<C64> {
    let m = m_for_plucker_len(z.len())?;
    QuadricForm::new(m)?.eval(z, w)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompoundMatrix {
    pub entries: CMatrix,
    pub source_det: C64,
}

impl CompoundMatrix {
    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn apply(&self, z: &CVector) -> CVector {
        &self.entries * z
    }
}

fn half_dimension(a: &CMatrix) -> Result<usize> {
    let (r, c) = a.shape();
    if r != c || r % 2 != 0 {
        return Err(Error::Usage(format!(
            "compound needs a square matrix of even size, got {r}×{c}"
        )));
    }
    let m = r / 2;
    check_m(m)?;
    Ok(m)
}

/// Determinant of the m×m submatrix (rows, cols) by partial-pivot elimination.
fn minor(a: &CMatrix, rows: &[usize], cols: &[usize]) -> C64 {
    let m = rows.len();
    let mut buf = [ZERO; MAX_M * MAX_M];
    for (i, &r) in rows.iter().enumerate() {
        for (j, &c) in cols.iter().enumerate() {
            buf[i * m + j] = a[(r, c)];
        }
    }
    let mut det = ONE;
    for k in 0..m {
        let (piv, best) = (k..m)
            .map(|i| (i, buf[i * m + k].norm()))
            .fold((k, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if best == 0.0 {
            return ZERO;
        }
        if piv != k {
            for j in 0..m {
                buf.swap(k * m + j, piv * m + j);
            }
            det = -det;
        }
        let p = buf[k * m + k];
        det *= p;
        for i in k + 1..m {
            let f = buf[i * m + k] / p;
            if f != ZERO {
                for j in k + 1..m {
                    let v = buf[k * m + j];
                    buf[i * m + j] -= f * v;
                }
            }
        }
    }
    det
}

fn zero_based(idx: &MultiIndex) -> Vec<usize> {
    idx.zero_based().collect()
}

/// Â: entry (K, J) is the minor of A with rows K and columns J.
pub fn compound(a: &CMatrix) -> Result<CompoundMatrix> {
    let m = half_dimension(a)?;
    let basis = ExteriorBasis::get(m)?;
    let idx: Vec<Vec<usize>> = basis.indices.iter().map(zero_based).collect();
    let len = basis.len();
    let entries = CMatrix::from_fn(len, len, |k, j| minor(a, &idx[k], &idx[j]));
    Ok(CompoundMatrix { entries, source_det: linalg::det(a) })
}

/// Â* with (Â*)^I_J = δ^{IK} δ_{LJ} A^L_K, so that Â*Â = det(A)·I.
pub fn adjugate_compound(a: &CMatrix) -> Result<CompoundMatrix> {
    let hat = compound(a)?;
    Ok(adjugate_of(&hat))
}

/// Â* computed from an existing compound.
pub fn adjugate_of(hat: &CompoundMatrix) -> CompoundMatrix {
    let m = m_for_plucker_len(hat.dim()).expect("compound dimension is valid");
    let basis = ExteriorBasis::get(m).expect("valid m");
    let len = basis.len();
    // δ^{IK} is nonzero only for K = I^c, δ_{LJ} only for L = J^c.
    let entries = CMatrix::from_fn(len, len, |i, j| {
        let k = basis.complement[i];
        let l = basis.complement[j];
        let s = basis.pair_sign[k] * basis.pair_sign[l];
        hat.entries[(l, k)] * s
    });
    CompoundMatrix { entries, source_det: hat.source_det }
}

/// Plücker coordinates of the column span of a 2m×m matrix: the m×m minors,
/// unnormalized.
pub fn plucker_of_subspace(b: &CMatrix, rank_tol: f64) -> Result<CVector> {
    let (rows, cols) = b.shape();
    if rows != 2 * cols {
        return Err(Error::Usage(format!(
            "spanning matrix must be 2m×m, got {rows}×{cols}"
        )));
    }
    let m = cols;
    check_m(m)?;
    let rank = linalg::numerical_rank(b, rank_tol);
    if rank < m {
        return Err(Error::DegenerateSubspace { rank, expected: m });
    }
    Ok(plucker_unchecked(b))
}

pub(crate) fn plucker_unchecked(b: &CMatrix) -> CVector {
    let m = b.ncols();
    let basis = ExteriorBasis::get(m).expect("checked by caller");
    let cols: Vec<usize> = (0..m).collect();
    CVector::from_iterator(
        basis.len(),
        basis.indices.iter().map(|k| minor(b, &zero_based(k), &cols)),
    )
}

/// Matrix of x ↦ x ∧ p from ℂ^{2m} to Λ^{m+1} (lexicographic basis of
/// (m+1)-subsets). Its kernel is the subspace carried by p when p is
/// decomposable.
pub fn wedge_map(p: &CVector) -> Result<CMatrix> {
    let m = m_for_plucker_len(p.len())?;
    let basis = ExteriorBasis::get(m)?;
    let dim = 2 * m;
    let mut targets: Vec<Vec<usize>> = Vec::new();
    subsets(dim, m + 1, &mut targets);
    let mut out = CMatrix::zeros(targets.len(), dim);
    for (pos, idx) in basis.indices.iter().enumerate() {
        let j = zero_based(idx);
        for i in 0..dim {
            if j.contains(&i) {
                continue;
            }
            // e_i ∧ e_J = (−1)^{#{j ∈ J : j < i}} e_{J ∪ {i}}
            let below = j.iter().filter(|&&x| x < i).count();
            let sign = if below % 2 == 0 { 1.0 } else { -1.0 };
            let mut union = j.clone();
            union.push(i);
            union.sort_unstable();
            let row = targets
                .binary_search(&union)
                .expect("union is an (m+1)-subset");
            out[(row, i)] += p[pos] * sign;
        }
    }
    Ok(out)
}

fn subsets(n: usize, k: usize, out: &mut Vec<Vec<usize>>) {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for e in start..n {
            cur.push(e);
            rec(e + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut Vec::new(), out);
}

/// Scale-relative residuals of the three compound identities for one
/// (A, z, w) sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentityResiduals {
    /// |Q(Âz, Âw) − det A·Q(z, w)| / (|det A|·‖z‖‖w‖)
    pub invariance: f64,
    /// ‖Â*Â − det A·I‖_max / max(1, |det A|)
    pub inverse: f64,
    /// |Q(Âz, w) − Q(z, Â*w)| / (‖Â‖_F·‖z‖‖w‖)
    pub adjoint: f64,
}

impl IdentityResiduals {
    pub fn worst(&self) -> f64 {
        self.invariance.max(self.inverse).max(self.adjoint)
    }
}

pub fn identity_residuals(a: &CMatrix, z: &CVector, w: &CVector) -> Result<IdentityResiduals> {
    let hat = compound(a)?;
    let star = adjugate_of(&hat);
    let m = half_dimension(a)?;
    let q = QuadricForm::new(m)?;
    let det = hat.source_det;
    let zw = z.norm() * w.norm();

    let lhs = q.eval(&hat.apply(z), &hat.apply(w))?;
    let rhs = det * q.eval(z, w)?;
    let invariance = (lhs - rhs).norm() / (det.norm() * zw);

    let prod = &star.entries * &hat.entries;
    let eye = CMatrix::identity(hat.dim(), hat.dim()) * det;
    let inverse = linalg::max_abs((prod - eye).iter()) / det.norm().max(1.0);

    let l = q.eval(&hat.apply(z), w)?;
    let r = q.eval(z, &star.apply(w))?;
    let adjoint = (l - r).norm() / (hat.entries.norm() * zw);

    Ok(IdentityResiduals { invariance, inverse, adjoint })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, random_matrix, random_vector};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn mi(m: usize, e: &[usize]) -> MultiIndex {
        MultiIndex::new(m, e.to_vec()).unwrap()
    }

    #[test]
    fn enumerates_m2_in_lex_order() {
        let list = enumerate_multiindices(2).unwrap();
        let got: Vec<Vec<usize>> = list.iter().map(|i| i.entries().to_vec()).collect();
        assert_eq!(
            got,
            vec![vec![1, 2], vec![1, 3], vec![1, 4], vec![2, 3], vec![2, 4], vec![3, 4]]
        );
        assert_eq!(mi(2, &[2, 3]).position(), 3);
    }

    #[test]
    fn enumeration_sizes_and_cap() {
        assert_eq!(enumerate_multiindices(3).unwrap().len(), 20);
        assert_eq!(enumerate_multiindices(6).unwrap().len(), 924);
        assert!(matches!(enumerate_multiindices(1), Err(Error::DimensionCap { m: 1 })));
        assert!(matches!(enumerate_multiindices(7), Err(Error::DimensionCap { m: 7 })));
    }

    #[test]
    fn multiindex_validation() {
        assert!(MultiIndex::new(2, vec![2, 1]).is_err());
        assert!(MultiIndex::new(2, vec![1, 5]).is_err());
        assert!(MultiIndex::new(2, vec![1]).is_err());
    }

    #[test]
    fn sign_examples() {
        assert_eq!(sign_delta(&mi(2, &[1, 2]), &mi(2, &[3, 4])).unwrap(), 1);
        assert_eq!(sign_delta(&mi(2, &[1, 3]), &mi(2, &[2, 4])).unwrap(), -1);
        assert_eq!(sign_delta(&mi(2, &[1, 2]), &mi(2, &[2, 3])).unwrap(), 0);
        assert!(sign_delta(&mi(2, &[1, 2]), &mi(3, &[1, 2, 3])).is_err());
    }

    #[test]
    fn delta_symmetry_and_inverse() {
        for m in 2..=4 {
            let q = QuadricForm::new(m).unwrap();
            let len = binomial(2 * m, m);
            let sgn = if m % 2 == 0 { 1.0 } else { -1.0 };
            for i in 0..len {
                for j in 0..len {
                    assert_eq!(q.delta(i, j), sgn * q.delta(j, i));
                    let contracted: f64 = (0..len).map(|k| q.delta(i, k) * q.delta_upper(k, j)).sum();
                    assert_eq!(contracted, if i == j { 1.0 } else { 0.0 });
                }
            }
        }
    }

    #[test]
    fn compound_of_diagonal() {
        let d = [c(2.0, 0.0), c(3.0, 0.0), c(5.0, 0.0), c(7.0, 0.0)];
        let a = CMatrix::from_diagonal(&CVector::from_row_slice(&d));
        let hat = compound(&a).unwrap();
        let expect = [6.0, 10.0, 14.0, 15.0, 21.0, 35.0];
        for i in 0..6 {
            for j in 0..6 {
                let e = if i == j { expect[i] } else { 0.0 };
                assert!((hat.entries[(i, j)] - c(e, 0.0)).norm() < 1e-14);
            }
        }
        assert!((hat.source_det - c(210.0, 0.0)).norm() < 1e-12);
        let id = compound(&CMatrix::identity(4, 4)).unwrap();
        assert_eq!(id.entries, CMatrix::identity(6, 6));
        assert_eq!(adjugate_compound(&CMatrix::identity(4, 4)).unwrap().entries, CMatrix::identity(6, 6));
    }

    #[test]
    fn identities_hold_for_random_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for m in 2..=3 {
            for _ in 0..10 {
                let a = random_matrix(&mut rng, 2 * m, 2 * m);
                let len = binomial(2 * m, m);
                let z = random_vector(&mut rng, len);
                let w = random_vector(&mut rng, len);
                let r = identity_residuals(&a, &z, &w).unwrap();
                assert!(r.worst() < 1e-11, "{r:?}");
            }
        }
    }

    #[test]
    fn q_examples() {
        let e = |i: usize| {
            let mut v = CVector::zeros(6);
            v[i] = ONE;
            v
        };
        assert_eq!(q_form(&e(0), &e(5)).unwrap(), ONE);
        assert_eq!(q_form(&e(0), &e(0)).unwrap(), ZERO);
        let b12 = CMatrix::from_column_slice(4, 2, &[ONE, ZERO, ZERO, ZERO, ZERO, ONE, ZERO, ZERO]);
        let b23 = CMatrix::from_column_slice(4, 2, &[ZERO, ONE, ZERO, ZERO, ZERO, ZERO, ONE, ZERO]);
        let p = plucker_of_subspace(&b12, 1e-8).unwrap();
        let q = plucker_of_subspace(&b23, 1e-8).unwrap();
        assert_eq!(p, e(0));
        assert_eq!(q_form(&p, &q).unwrap(), ZERO);
        assert!(q_form(&p, &CVector::zeros(5)).is_err());
    }

    #[test]
    fn twisted_cubic_tangent_at_one() {
        // columns 3μ²e₀+2μe₁+e₂ and μ³e₀+μ²e₁+μe₂+e₃ at μ = 1
        let b = CMatrix::from_column_slice(
            4,
            2,
            &[c(3.0, 0.0), c(2.0, 0.0), ONE, ZERO, ONE, ONE, ONE, ONE],
        );
        let p = plucker_of_subspace(&b, 1e-8).unwrap();
        let ratio = p.map(|x| x / p[5]);
        let expect = [1.0, 2.0, 3.0, 1.0, 2.0, 1.0];
        for (x, e) in ratio.iter().zip(expect) {
            assert!((x - c(e, 0.0)).norm() < 1e-14);
        }
    }

    #[test]
    fn rank_deficient_basis_is_rejected() {
        let b = CMatrix::from_column_slice(4, 2, &[ONE, ZERO, ZERO, ZERO, c(2.0, 0.0), ZERO, ZERO, ZERO]);
        assert!(matches!(
            plucker_of_subspace(&b, 1e-8),
            Err(Error::DegenerateSubspace { rank: 1, expected: 2 })
        ));
    }

    #[test]
    fn wedge_kernel_recovers_subspace() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let b = random_matrix(&mut rng, 6, 3);
        let p = plucker_of_subspace(&b, 1e-8).unwrap();
        let w = wedge_map(&p).unwrap();
        assert_eq!(w.shape(), (15, 6));
        let resid = &w * &b;
        assert!(resid.iter().all(|z| z.norm() < 1e-12 * p.norm()));
    }
}
