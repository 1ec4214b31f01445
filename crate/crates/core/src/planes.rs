//! n-planes in ℙ^{2n+1}: Plücker vector, spanning basis and (when the plane
//! is transverse to {z″ = 0}) the graph form z′ = X z″.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::exterior::{self, QuadricForm};
use crate::linalg::{self, CMatrix, CVector, ONE};
use crate::tol::Tolerances;

#[derive(Debug, Clone, PartialEq)]
pub struct NPlane {
    n: usize,
    plucker: CVector,
    basis: CMatrix,
    graph: Option<CMatrix>,
}

impl NPlane {
    /// Plane spanned by the columns of a (2n+2)×(n+1) matrix.
    pub fn from_basis(b: &CMatrix, tol: &Tolerances) -> Result<Self> {
        let raw = exterior::plucker_of_subspace(b, tol.rank)?;
        let plucker = linalg::normalize_vector(&raw).ok_or(Error::DegenerateSubspace {
            rank: 0,
            expected: b.ncols(),
        })?;
        let basis = linalg::orthonormal_columns(b, tol.rank);
        Ok(Self::assemble(b.ncols() - 1, plucker, basis, tol))
    }

    /// Plane {z′ = X z″}.
    pub fn from_graph(x: &CMatrix) -> Result<Self> {
        let m = x.nrows();
        if x.ncols() != m {
            return Err(Error::Usage(format!("graph matrix must be square, got {:?}", x.shape())));
        }
        let mut b = CMatrix::zeros(2 * m, m);
        b.view_mut((0, 0), (m, m)).copy_from(x);
        b.view_mut((m, 0), (m, m)).fill_with_identity();
        let plucker = linalg::normalize_vector(&exterior::plucker_unchecked(&b))
            .expect("lower identity block makes the e_{z″} coordinate 1");
        let basis = linalg::orthonormal_columns(&b, 0.0);
        Ok(Self { n: m - 1, plucker, basis, graph: Some(x.clone()) })
    }

    /// Plane carried by a decomposable Plücker vector. The subspace is the
    /// kernel of x ↦ x ∧ p, which has dimension m exactly when p is
    /// decomposable.
    pub fn from_plucker(p: &CVector, tol: &Tolerances) -> Result<Self> {
        let m = exterior::m_for_plucker_len(p.len())?;
        let plucker = linalg::normalize_vector(p).ok_or(Error::NotDecomposable {
            found: 0,
            expected: m,
        })?;
        let residual = quadric_residual(&plucker)?;
        if residual > tol.quadric {
            return Err(Error::NotDecomposable { found: 0, expected: m });
        }
        let wedge = exterior::wedge_map(&plucker)?;
        let (kernel, sv) = linalg::null_space(&wedge, m);
        let top = sv.first().copied().unwrap_or(0.0);
        // The wedge residual is first order in the distance to the
        // Grassmannian, so the cut is the square root of the quadric one.
        let cut = tol.quadric.sqrt() * top;
        let found = sv.iter().filter(|&&s| s <= cut).count();
        if found != m {
            return Err(Error::NotDecomposable { found, expected: m });
        }
        Ok(Self::assemble(m - 1, plucker, kernel, tol))
    }

    /// Span of coordinate axes e_i (0-based).
    pub fn span_of_axes(n: usize, axes: &[usize]) -> Result<Self> {
        let mut b = CMatrix::zeros(2 * n + 2, axes.len());
        for (k, &i) in axes.iter().enumerate() {
            if i >= 2 * n + 2 {
                return Err(Error::Usage(format!("axis {i} out of range")));
            }
            b[(i, k)] = ONE;
        }
        Self::from_basis(&b, &Tolerances::default())
    }

    fn assemble(n: usize, plucker: CVector, basis: CMatrix, tol: &Tolerances) -> Self {
        let graph = graph_from_basis(&basis, tol.rank);
        Self { n, plucker, basis, graph }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Normalized Plücker vector: largest entry 1, real positive.
    pub fn plucker(&self) -> &CVector {
        &self.plucker
    }

    /// Orthonormal spanning columns.
    pub fn basis(&self) -> &CMatrix {
        &self.basis
    }

    pub fn graph(&self) -> Option<&CMatrix> {
        self.graph.as_ref()
    }

    /// X with plane = {z′ = X z″}, or `None` when the plane meets {z″ = 0}.
    pub fn plucker_to_graph(&self) -> Option<CMatrix> {
        self.graph.clone()
    }

    pub fn quadric_residual(&self) -> f64 {
        quadric_residual(&self.plucker).expect("plucker length validated")
    }

    /// Image under a linear map of ℂ^{2n+2}.
    pub fn transform(&self, g: &CMatrix, tol: &Tolerances) -> Result<Self> {
        Self::from_basis(&(g * &self.basis), tol)
    }

    /// Sine of the angle between `z` and the plane.
    pub fn point_distance(&self, z: &CVector) -> f64 {
        linalg::point_subspace_distance(z, &self.basis)
    }
}

/// |Q(p, p)| / ‖p‖².
pub fn quadric_residual(p: &CVector) -> Result<f64> {
    let m = exterior::m_for_plucker_len(p.len())?;
    let q = QuadricForm::new(m)?.eval(p, p)?;
    Ok(q.norm() / p.norm_squared())
}

fn graph_from_basis(basis: &CMatrix, rank_tol: f64) -> Option<CMatrix> {
    let m = basis.ncols();
    let upper = basis.rows(0, m).into_owned();
    let lower = basis.rows(m, m).into_owned();
    let sv = linalg::singular_values(&lower);
    let smallest = sv.last().copied().unwrap_or(0.0);
    // `basis` has orthonormal columns, so its own scale is 1.
    if smallest <= rank_tol {
        return None;
    }
    linalg::inverse(&lower).map(|inv| upper * inv)
}

pub fn graph_to_plucker(x: &CMatrix) -> Result<NPlane> {
    NPlane::from_graph(x)
}

/// Whether the planes meet: |Q(p₁, p₂)| ≤ tol·‖p₁‖‖p₂‖.
pub fn planes_intersect(l1: &NPlane, l2: &NPlane, tol: &Tolerances) -> Result<bool> {
    Ok(intersection_value(l1, l2)? <= tol.rank)
}

/// |Q(p₁, p₂)| / (‖p₁‖‖p₂‖), the quantity behind [`planes_intersect`].
pub fn intersection_value(l1: &NPlane, l2: &NPlane) -> Result<f64> {
    if l1.n != l2.n {
        return Err(Error::Usage(format!(
            "planes of different dimension ({} and {})",
            l1.n, l2.n
        )));
    }
    let q = exterior::q_form(&l1.plucker, &l2.plucker)?;
    Ok(q.norm() / (l1.plucker.norm() * l2.plucker.norm()))
}

/// Chordal distance between Plücker points: min over phases of
/// ‖p − e^{iφ}q‖/√2 for unit representatives.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct PlaneDistance(pub f64);

impl PlaneDistance {
    pub fn value(self) -> f64 {
        self.0
    }
}

pub fn plane_distance(l1: &NPlane, l2: &NPlane) -> Result<PlaneDistance> {
    if l1.n != l2.n {
        return Err(Error::Usage(format!(
            "planes of different dimension ({} and {})",
            l1.n, l2.n
        )));
    }
    Ok(PlaneDistance(linalg::chordal_distance(&l1.plucker, &l2.plucker)))
}

/// `count` points basis·u with u uniform on the unit sphere of ℂ^{n+1}.
pub fn sample_points(l: &NPlane, count: usize, seed: u64) -> Vec<CVector> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let u = linalg::random_unit_vector(&mut rng, l.n + 1);
            &l.basis * u
        })
        .collect()
}
