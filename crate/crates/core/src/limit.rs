//! Limits of normalized matrix sequences, limit n-planes through compound
//! matrices, and limit-set point clouds.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exterior;
use crate::group::{enumerate_words, GroupSpec, ProjectiveMap, Word};
use crate::linalg::{self, CMatrix, CVector};
use crate::planes::{self, NPlane};
use crate::tol::Tolerances;

#[derive(Debug, Clone, PartialEq)]
pub struct SequenceLimit {
    pub limit_matrix: CMatrix,
    pub numerical_rank: usize,
    pub image_basis: CMatrix,
    pub kernel_basis: CMatrix,
    pub converged: bool,
    /// σ_{r+1}/σ_r for the numerical rank r (0 at full rank).
    pub gap: f64,
    pub singular_values: Vec<f64>,
    /// Phase-aligned max-entry differences between consecutive terms.
    pub steps: Vec<f64>,
}

impl SequenceLimit {
    pub fn last_step(&self) -> f64 {
        self.steps.last().copied().unwrap_or(0.0)
    }
}

/// Normalizes each matrix, checks the tail for numerical Cauchy behaviour and
/// reads rank, image and kernel off the last term.
pub fn sequence_limit(mats: &[CMatrix], tol: &Tolerances) -> Result<SequenceLimit> {
    if mats.len() < 2 {
        return Err(Error::Usage(format!(
            "a sequence limit needs at least 2 terms, got {}",
            mats.len()
        )));
    }
    let normalized: Vec<CMatrix> = mats
        .iter()
        .map(|m| {
            linalg::normalize_matrix(m)
                .map(|(n, _)| n)
                .ok_or_else(|| Error::Usage("zero matrix in sequence".into()))
        })
        .collect::<Result<_>>()?;
    let steps: Vec<f64> = normalized
        .windows(2)
        .map(|w| linalg::phase_aligned_max_diff(&w[1], &w[0]))
        .collect();
    let converged = steps.last().is_some_and(|&s| s <= tol.cauchy);
    let limit = normalized.last().expect("at least two terms").clone();

    let dim = limit.ncols();
    let svd = limit.clone().svd(true, true);
    let sv: Vec<f64> = svd.singular_values.iter().copied().collect();
    let top = sv.first().copied().unwrap_or(0.0);
    let rank = sv.iter().filter(|&&s| s > tol.rank * top).count();
    let gap = if rank < sv.len() && rank > 0 { sv[rank] / sv[rank - 1] } else { 0.0 };
    let u = svd.u.expect("requested U");
    let v = svd.v_t.expect("requested V^H").adjoint();
    Ok(SequenceLimit {
        limit_matrix: limit,
        numerical_rank: rank,
        image_basis: u.columns(0, rank).into_owned(),
        kernel_basis: v.columns(rank, dim - rank).into_owned(),
        converged,
        gap,
        singular_values: sv,
        steps,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct LimitPlaneResult {
    pub plane: NPlane,
    pub residual_on_quadric: f64,
    /// σ₂/σ₁ of the compound limit.
    pub rank1_gap: f64,
    pub limit: SequenceLimit,
}

/// Limit n-plane of a sequence of group elements, read off the compound
/// sequence. The compounds are taken from the representatives, which must
/// still resolve their m-th singular direction; for long words use
/// [`limit_nplane_of_words`] or [`limit_nplane_of_powers`].
pub fn limit_nplane(seq: &[ProjectiveMap], tol: &Tolerances) -> Result<LimitPlaneResult> {
    if seq.len() < 8 {
        return Err(Error::Usage(format!(
            "limit n-plane extraction needs at least 8 terms, got {}",
            seq.len()
        )));
    }
    let compounds: Vec<CMatrix> = seq
        .par_iter()
        .map(|g| exterior::compound(g.rep()).map(|c| c.entries))
        .collect::<Result<_>>()?;
    limit_nplane_from_compounds(&compounds, tol)
}

/// Limit plane of g^{k} over the given exponents, with powers formed on the
/// compound side by repeated squaring. Useful when convergence is slow and
/// very large exponents are needed.
pub fn limit_nplane_of_powers(g: &ProjectiveMap, exponents: &[i64], tol: &Tolerances) -> Result<LimitPlaneResult> {
    let hat = exterior::compound(g.rep())?.entries;
    let hat_inv = exterior::compound(g.inverse().rep())?.entries;
    let compounds: Vec<CMatrix> = exponents
        .iter()
        .map(|&k| normalized_power(if k < 0 { &hat_inv } else { &hat }, k.unsigned_abs()))
        .collect();
    limit_nplane_from_compounds(&compounds, tol)
}

/// M^k rescaled after every product so that nothing overflows.
pub fn normalized_power(m: &CMatrix, k: u64) -> CMatrix {
    let renorm = |x: CMatrix| linalg::normalize_matrix(&x).map(|(n, _)| n).unwrap_or(x);
    let mut acc = CMatrix::identity(m.nrows(), m.ncols());
    let mut sq = renorm(m.clone());
    let mut e = k;
    while e > 0 {
        if e & 1 == 1 {
            acc = renorm(&acc * &sq);
        }
        e >>= 1;
        if e > 0 {
            sq = renorm(&sq * &sq);
        }
    }
    acc
}

pub fn limit_nplane_from_compounds(compounds: &[CMatrix], tol: &Tolerances) -> Result<LimitPlaneResult> {
    let limit = sequence_limit(compounds, tol)?;
    if !limit.converged {
        return Err(Error::Undecided { last_step: limit.last_step() });
    }
    let sv = &limit.singular_values;
    let rank1_gap = if sv.len() > 1 && sv[0] > 0.0 { sv[1] / sv[0] } else { 0.0 };
    if limit.numerical_rank != 1 || rank1_gap >= tol.rank_one_gap {
        return Err(Error::NotALimitPlane { rank: limit.numerical_rank.max(2) });
    }
    let image = limit.image_basis.column(0).into_owned();
    let plane = NPlane::from_plucker(&image, tol)?;
    let residual_on_quadric = plane.quadric_residual();
    Ok(LimitPlaneResult { plane, residual_on_quadric, rank1_gap, limit })
}

/// Compound of a word, multiplied letter by letter from the generator
/// compounds and renormalized after every product.
pub fn word_compound(spec: &GroupSpec, word: &Word) -> Result<CMatrix> {
    let hats = generator_compounds(spec)?;
    Ok(word_compound_with(&hats, word))
}

fn generator_compounds(spec: &GroupSpec) -> Result<Vec<(CMatrix, CMatrix)>> {
    spec.generators
        .iter()
        .map(|g| {
            let hat = exterior::compound(g.map.rep())?.entries;
            let hat_inv = exterior::compound(g.map.inverse().rep())?.entries;
            Ok((hat, hat_inv))
        })
        .collect()
}

fn word_compound_with(hats: &[(CMatrix, CMatrix)], word: &Word) -> CMatrix {
    let dim = hats.first().map_or(1, |h| h.0.nrows());
    word.letters().iter().fold(CMatrix::identity(dim, dim), |acc, l| {
        let (hat, hat_inv) = &hats[l.generator];
        let prod = acc * if l.inverse { hat_inv } else { hat };
        linalg::normalize_matrix(&prod).map(|(m, _)| m).unwrap_or(prod)
    })
}

/// Limit n-plane along a sequence of words, with compounds formed on the
/// compound side so that long words keep their full rank information.
pub fn limit_nplane_of_words(spec: &GroupSpec, words: &[Word], tol: &Tolerances) -> Result<LimitPlaneResult> {
    if words.len() < 8 {
        return Err(Error::Usage(format!(
            "limit n-plane extraction needs at least 8 terms, got {}",
            words.len()
        )));
    }
    let hats = generator_compounds(spec)?;
    let compounds: Vec<CMatrix> = words.par_iter().map(|w| word_compound_with(&hats, w)).collect();
    limit_nplane_from_compounds(&compounds, tol)
}

/// g, g², …, g^count. Feeding long powers of a strongly loxodromic element
/// to [`limit_nplane`] loses the plane; see [`limit_nplane_of_powers`].
pub fn power_sequence(g: &ProjectiveMap, count: usize) -> Vec<ProjectiveMap> {
    let mut out = Vec::with_capacity(count);
    let mut acc = g.clone();
    for _ in 0..count {
        out.push(acc.clone());
        acc = acc.compose(g);
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct CloudPlane {
    pub word: Word,
    pub word_length: usize,
    pub plane: NPlane,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CloudPoint {
    pub word_length: usize,
    /// Projectively normalized homogeneous coordinates.
    pub point: CVector,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct LimitCloud {
    pub planes: Vec<CloudPlane>,
    pub points: Vec<CloudPoint>,
    pub truncated: bool,
}

#[derive(Debug, Clone, Default)]
pub struct CloudOptions {
    /// Plane pushed around by the group; defaults to T⁻¹{w″ = 0} for the
    /// spec's frame T, i.e. {z″ = 0} without a frame.
    pub seed_plane: Option<NPlane>,
    /// Keep a truncated enumeration instead of failing on the word budget.
    pub allow_partial: bool,
}

pub fn default_seed_plane(spec: &GroupSpec, tol: &Tolerances) -> Result<NPlane> {
    let k = spec.n + 1;
    let mut b = CMatrix::zeros(2 * k, k);
    b.view_mut((0, 0), (k, k)).fill_with_identity();
    let b = match &spec.frame {
        Some(t) => linalg::inverse(t).ok_or_else(|| Error::Usage("singular frame".into()))? * b,
        None => b,
    };
    NPlane::from_basis(&b, tol)
}

/// Images of a seed plane under the words of length L−2..=L, each sampled
/// at `samples_per_plane` points.
pub fn limit_set_cloud(
    spec: &GroupSpec,
    max_length: usize,
    samples_per_plane: usize,
    seed: u64,
    options: &CloudOptions,
    tol: &Tolerances,
) -> Result<LimitCloud> {
    let enumeration = enumerate_words(spec, max_length, options.allow_partial)?;
    let seed_plane = match &options.seed_plane {
        Some(p) => p.clone(),
        None => default_seed_plane(spec, tol)?,
    };
    let low = max_length.saturating_sub(2).max(1);
    let chosen: Vec<_> = enumeration
        .elements
        .iter()
        .filter(|e| e.length >= low && e.length <= max_length)
        .collect();
    let results: Vec<(CloudPlane, Vec<CloudPoint>)> = chosen
        .par_iter()
        .enumerate()
        .map(|(i, e)| {
            let plane = spec.word_image(e.map.word(), &seed_plane, tol)?;
            let sub_seed = seed ^ (i as u64).wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
            let points = planes::sample_points(&plane, samples_per_plane, sub_seed)
                .into_iter()
                .map(|z| CloudPoint {
                    word_length: e.length,
                    point: linalg::normalize_vector(&z).unwrap_or(z),
                })
                .collect();
            Ok((
                CloudPlane { word: e.map.word().clone(), word_length: e.length, plane },
                points,
            ))
        })
        .collect::<Result<_>>()?;
    let mut cloud = LimitCloud { truncated: enumeration.truncated, ..Default::default() };
    for (plane, points) in results {
        cloud.planes.push(plane);
        cloud.points.extend(points);
    }
    Ok(cloud)
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrbitReport {
    /// distances[p][k−1] is the distance of g^k(probe p) to the target plane.
    pub distances: Vec<Vec<f64>>,
    /// Indices of the probes that were used, parallel to `distances`.
    pub used_probes: Vec<usize>,
    /// Probes dropped because they sit near the repelling plane.
    pub excluded: Vec<(usize, String)>,
}

/// Minimum distance from the repelling plane for a probe to be used.
pub const REPELLER_CLEARANCE: f64 = 1e-3;

/// Distances from g^k(probe) to `target` for k = 1..=iterations. Probes near
/// the repelling plane (limit of g^{−ν}) are excluded with a note.
pub fn orbit_convergence_report(
    g: &ProjectiveMap,
    target: &NPlane,
    probes: &[CVector],
    iterations: usize,
    tol: &Tolerances,
) -> OrbitReport {
    let exponents: Vec<i64> = (1..=64).map(|k| -k).collect();
    let repeller = limit_nplane_of_powers(g, &exponents, tol).ok();
    let mut report = OrbitReport { distances: Vec::new(), used_probes: Vec::new(), excluded: Vec::new() };
    for (i, probe) in probes.iter().enumerate() {
        if let Some(rep) = &repeller {
            let d = rep.plane.point_distance(probe);
            if d <= REPELLER_CLEARANCE {
                report
                    .excluded
                    .push((i, format!("probe lies within {d:.1e} of the repelling plane")));
                continue;
            }
        }
        let mut z = linalg::unit(probe);
        let mut row = Vec::with_capacity(iterations);
        for _ in 0..iterations {
            z = linalg::unit(&g.apply(&z));
            row.push(target.point_distance(&z));
        }
        report.distances.push(row);
        report.used_probes.push(i);
    }
    report
}
