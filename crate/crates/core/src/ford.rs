//! The Ford-region analogue: μ_g, membership in the region cut out by all
//! μ_g ≤ 1, tube estimates, (♣)/(♠) diagnostics and the volume pullback.
//!
//! All quantities are evaluated in the spec's frame: generators are
//! conjugated by the frame T and points are taken in w = Tz coordinates.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::{c_inverse_norm_scaled, enumerate_words, GroupSpec, ProjectiveMap, Word};
use crate::linalg::{self, CMatrix, CVector};
use crate::tol::Tolerances;

/// μ_g(z) = ‖z″‖ / ‖C z′ + D z″‖ for the unimodular representative.
///
/// Returns +∞ when the denominator vanishes (z ∈ g⁻¹{z″ = 0}) and a
/// C-singular error when det C_g ≈ 0. The identity has μ ≡ 1.
pub fn mu(g: &ProjectiveMap, z: &CVector, tol: &Tolerances) -> Result<f64> {
    if g.word().is_empty() && g.is_identity(tol) {
        return Ok(1.0);
    }
    if c_inverse_norm_scaled(&g.c(), g.log_scale(), tol).is_infinite() {
        return Err(Error::CSingular { word: g.word().clone() });
    }
    Ok(mu_raw(g, z, tol))
}

/// μ_g without the C-block precondition.
pub fn mu_raw(g: &ProjectiveMap, z: &CVector, tol: &Tolerances) -> f64 {
    let k = g.n() + 1;
    let lower = g.rep().rows(k, k);
    mu_from_lower(&lower.into_owned(), g.log_scale(), z, tol)
}

fn mu_from_lower(lower: &CMatrix, log_scale: f64, z: &CVector, tol: &Tolerances) -> f64 {
    let k = lower.nrows();
    let num = z.rows(k, k).norm();
    if num == 0.0 {
        return 0.0;
    }
    let den_rep = (lower * z).norm();
    let scale = lower.norm() * z.norm();
    if den_rep <= tol.mu_denominator * scale {
        return f64::INFINITY;
    }
    // e^{−ls} applied last so that long words neither overflow nor underflow.
    ((num / den_rep).ln() - log_scale).exp()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FordStatus {
    Interior,
    Boundary,
    Exterior,
    Undecided,
}

impl std::fmt::Display for FordStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            FordStatus::Interior => "interior",
            FordStatus::Boundary => "boundary",
            FordStatus::Exterior => "exterior",
            FordStatus::Undecided => "undecided",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FordVerdict {
    pub point: CVector,
    pub status: FordStatus,
    /// Word with μ ≥ 1 − tol, present exactly for boundary and exterior.
    pub witness: Option<Word>,
    /// Largest word length examined.
    pub depth: usize,
    pub max_mu: f64,
    /// A generator of finite order was detected; the region need not be a
    /// fundamental set then.
    pub torsion_caveat: bool,
}

struct FordWord {
    word: Word,
    length: usize,
    lower: CMatrix,
    log_scale: f64,
}

/// Words of length ≤ L prepared for repeated μ evaluation.
pub struct FordRegion {
    spec: GroupSpec,
    words: Vec<FordWord>,
    depth: usize,
    torsion: bool,
    truncated: bool,
    frame_used: bool,
    tol: Tolerances,
}

impl FordRegion {
    pub fn new(spec: &GroupSpec, max_length: usize, allow_partial: bool, tol: &Tolerances) -> Result<Self> {
        let framed = spec.framed();
        let enumeration = enumerate_words(&framed, max_length, allow_partial)?;
        let k = spec.n + 1;
        let words = enumeration
            .non_identity()
            .map(|e| FordWord {
                word: e.map.word().clone(),
                length: e.length,
                lower: e.map.rep().rows(k, k).into_owned(),
                log_scale: e.map.log_scale(),
            })
            .collect();
        Ok(Self {
            torsion: !framed.torsion_generators(tol).is_empty(),
            spec: framed,
            words,
            depth: max_length,
            truncated: enumeration.truncated,
            frame_used: spec.frame.is_some(),
            tol: *tol,
        })
    }

    /// The spec with generators already conjugated into the frame.
    pub fn framed_spec(&self) -> &GroupSpec {
        &self.spec
    }

    pub fn frame_used(&self) -> bool {
        self.frame_used
    }

    pub fn truncated(&self) -> bool {
        self.truncated
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    /// max_g μ_g(z) over the prepared words, with the maximizing word.
    pub fn max_mu(&self, z: &CVector) -> (f64, Option<Word>) {
        let mut best = (f64::NEG_INFINITY, None);
        for w in &self.words {
            let m = mu_from_lower(&w.lower, w.log_scale, z, &self.tol);
            if m > best.0 {
                best = (m, Some(w.word.clone()));
            }
        }
        best
    }

    pub fn classify(&self, z: &CVector) -> FordVerdict {
        let band = self.tol.boundary;
        let mut boundary: Option<Word> = None;
        let mut shell_max: Vec<f64> = vec![f64::NEG_INFINITY; self.depth + 1];
        let mut max_mu = f64::NEG_INFINITY;
        for w in &self.words {
            let m = mu_from_lower(&w.lower, w.log_scale, z, &self.tol);
            max_mu = max_mu.max(m);
            if m > 1.0 + band {
                return self.verdict(z, FordStatus::Exterior, Some(w.word.clone()), m);
            }
            if (m - 1.0).abs() <= band && boundary.is_none() {
                boundary = Some(w.word.clone());
            }
            if w.length < shell_max.len() {
                shell_max[w.length] = shell_max[w.length].max(m);
            }
        }
        if let Some(word) = boundary {
            return self.verdict(z, FordStatus::Boundary, Some(word), max_mu);
        }
        let shells: Vec<f64> = shell_max.into_iter().skip(1).filter(|m| m.is_finite()).collect();
        let trend_ok = match shells.split_last() {
            Some((last, earlier)) if !earlier.is_empty() => {
                *last <= earlier.iter().copied().fold(f64::NEG_INFINITY, f64::max)
            }
            _ => true,
        };
        let status = if max_mu < 1.0 - band && trend_ok {
            FordStatus::Interior
        } else {
            FordStatus::Undecided
        };
        self.verdict(z, status, None, max_mu)
    }

    fn verdict(&self, z: &CVector, status: FordStatus, witness: Option<Word>, max_mu: f64) -> FordVerdict {
        FordVerdict {
            point: z.clone(),
            status,
            witness,
            depth: self.depth,
            max_mu,
            torsion_caveat: self.torsion,
        }
    }

    pub fn classify_many(&self, points: &[CVector]) -> Vec<FordVerdict> {
        points.par_iter().map(|z| self.classify(z)).collect()
    }
}

/// One-shot membership test; see [`FordRegion`] for repeated queries.
pub fn ford_membership(z: &CVector, spec: &GroupSpec, max_length: usize, tol: &Tolerances) -> Result<FordVerdict> {
    Ok(FordRegion::new(spec, max_length, false, tol)?.classify(z))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShellBound {
    pub length: usize,
    /// max over the shell of max(‖A C⁻¹‖, ‖C⁻¹ D‖)
    pub r0: f64,
    /// max over the shell of ‖C⁻¹‖
    pub rho: f64,
}

/// L-truncated estimate of the tube radius R = R₀ + ρ.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VrEstimate {
    pub r: f64,
    pub r0: f64,
    pub rho: f64,
    pub per_shell: Vec<ShellBound>,
    /// The last shell raised ρ above all earlier shells.
    pub growing: bool,
    pub depth: usize,
    pub frame_used: bool,
}

/// Block quantities of one word: (‖C⁻¹‖, max(‖A C⁻¹‖, ‖C⁻¹ D‖)), both +∞
/// when C is singular.
fn block_bounds(g: &ProjectiveMap, tol: &Tolerances) -> (f64, f64) {
    let c_inv_norm = c_inverse_norm_scaled(&g.c(), g.log_scale(), tol);
    if c_inv_norm.is_infinite() {
        return (f64::INFINITY, f64::INFINITY);
    }
    let c_inv = linalg::inverse(&g.c()).expect("C checked nonsingular");
    // A C⁻¹ and C⁻¹ D do not depend on the scalar representative.
    let r0 = linalg::op_norm(&(g.a() * &c_inv)).max(linalg::op_norm(&(&c_inv * g.d())));
    (c_inv_norm, r0)
}

pub fn v_r_estimate(spec: &GroupSpec, max_length: usize, tol: &Tolerances) -> Result<VrEstimate> {
    let framed = spec.framed();
    let enumeration = framed.enumerate(max_length)?;
    let rows: Vec<(usize, Word, f64, f64)> = enumeration
        .elements
        .par_iter()
        .filter(|e| e.length > 0)
        .map(|e| {
            let (rho, r0) = block_bounds(&e.map, tol);
            (e.length, e.map.word().clone(), rho, r0)
        })
        .collect();
    if let Some((_, word, _, _)) = rows.iter().find(|r| r.2.is_infinite()) {
        return Err(Error::CSingular { word: word.clone() });
    }
    let mut per_shell: Vec<ShellBound> = Vec::new();
    for (length, _, rho, r0) in &rows {
        match per_shell.last_mut() {
            Some(s) if s.length == *length => {
                s.rho = s.rho.max(*rho);
                s.r0 = s.r0.max(*r0);
            }
            _ => per_shell.push(ShellBound { length: *length, r0: *r0, rho: *rho }),
        }
    }
    let r0 = per_shell.iter().map(|s| s.r0).fold(0.0, f64::max);
    let rho = per_shell.iter().map(|s| s.rho).fold(0.0, f64::max);
    let growing = match per_shell.split_last() {
        Some((last, earlier)) if !earlier.is_empty() => {
            last.rho > earlier.iter().map(|s| s.rho).fold(0.0, f64::max)
        }
        _ => false,
    };
    Ok(VrEstimate {
        r: r0 + rho,
        r0,
        rho,
        per_shell,
        growing,
        depth: max_length,
        frame_used: spec.frame.is_some(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShellStats {
    pub length: usize,
    pub count: usize,
    /// Largest finite ‖C⁻¹‖ in the shell.
    pub max: f64,
    pub min: f64,
    /// Words whose C block is singular.
    pub infinite: usize,
    pub r0_max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeriesRow {
    pub delta: f64,
    /// Σ‖C⁻¹‖^δ over each shell.
    pub increments: Vec<f64>,
    /// Running totals over shells; nondecreasing.
    pub partial_sums: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClubSpadeReport {
    pub shells: Vec<ShellStats>,
    /// Supremum estimate of ‖C⁻¹‖ over the enumerated words.
    pub rho: f64,
    /// Supremum estimate of max(‖A C⁻¹‖, ‖C⁻¹ D‖).
    pub r0: f64,
    /// First shell from which the shell maxima strictly decrease to the end.
    pub monotone_from: Option<usize>,
    pub series: Vec<SeriesRow>,
    /// (decade, count): number of finite ‖C⁻¹‖ values in [10^d, 10^{d+1}).
    pub histogram: Vec<(i32, usize)>,
    pub frame_used: bool,
    pub truncated: bool,
    pub torsion_generators: Vec<usize>,
}

impl ClubSpadeReport {
    pub fn is_empty(&self) -> bool {
        self.shells.is_empty()
    }
}

pub fn club_spade_diagnostics(
    spec: &GroupSpec,
    max_length: usize,
    deltas: &[f64],
    allow_partial: bool,
    tol: &Tolerances,
) -> Result<ClubSpadeReport> {
    let framed = spec.framed();
    let enumeration = enumerate_words(&framed, max_length, allow_partial)?;
    let rows: Vec<(usize, f64, f64)> = enumeration
        .elements
        .par_iter()
        .filter(|e| e.length > 0)
        .map(|e| {
            let (rho, r0) = block_bounds(&e.map, tol);
            (e.length, rho, r0)
        })
        .collect();

    let mut shells: Vec<ShellStats> = Vec::new();
    for &(length, rho, r0) in &rows {
        if shells.last().is_none_or(|s| s.length != length) {
            shells.push(ShellStats {
                length,
                count: 0,
                max: 0.0,
                min: f64::INFINITY,
                infinite: 0,
                r0_max: 0.0,
            });
        }
        let s = shells.last_mut().expect("just pushed");
        s.count += 1;
        if rho.is_finite() {
            s.max = s.max.max(rho);
            s.min = s.min.min(rho);
            s.r0_max = s.r0_max.max(r0);
        } else {
            s.infinite += 1;
        }
    }

    let monotone_from = if shells.is_empty() {
        None
    } else {
        let mut start = shells.len() - 1;
        while start > 0 && shells[start - 1].max > shells[start].max {
            start -= 1;
        }
        Some(shells[start].length)
    };

    let series = deltas
        .iter()
        .map(|&delta| {
            let mut increments = vec![0.0; shells.len()];
            for &(length, rho, _) in &rows {
                if rho.is_finite() {
                    let idx = shells.iter().position(|s| s.length == length).expect("shell exists");
                    increments[idx] += rho.powf(delta);
                }
            }
            let partial_sums = increments
                .iter()
                .scan(0.0, |acc, x| {
                    *acc += x;
                    Some(*acc)
                })
                .collect();
            SeriesRow { delta, increments, partial_sums }
        })
        .collect();

    let mut histogram: Vec<(i32, usize)> = Vec::new();
    for &(_, rho, _) in &rows {
        if rho.is_finite() && rho > 0.0 {
            let decade = rho.log10().floor() as i32;
            match histogram.iter_mut().find(|(d, _)| *d == decade) {
                Some(entry) => entry.1 += 1,
                None => histogram.push((decade, 1)),
            }
        }
    }
    histogram.sort_unstable();

    Ok(ClubSpadeReport {
        rho: shells.iter().map(|s| s.max).fold(0.0, f64::max),
        r0: shells.iter().map(|s| s.r0_max).fold(0.0, f64::max),
        shells,
        monotone_from,
        series,
        histogram,
        frame_used: spec.frame.is_some(),
        truncated: enumeration.truncated,
        torsion_generators: framed.torsion_generators(tol),
    })
}

/// Affine coordinates on the chart U_{n+1} = {z_{2n+1} ≠ 0}:
/// ζ^j = z^j / z^{2n+1} (j = 0..n) and x^k = z^{n+k} / z^{2n+1} (k = 1..n).
#[derive(Debug, Clone, PartialEq)]
pub struct VolumeChart {
    pub zeta: CVector,
    pub x: CVector,
}

/// Relative size of the last coordinate below which a point is treated as
/// outside the chart.
const CHART_EDGE: f64 = 1e-12;

impl VolumeChart {
    pub fn from_point(z: &CVector) -> Result<Self> {
        let dim = z.len();
        let last = z[dim - 1];
        if last.norm() <= CHART_EDGE * z.norm() {
            return Err(Error::ChartEscape);
        }
        let n = dim / 2 - 1;
        let u = z.map(|c| c / last);
        Ok(Self { zeta: u.rows(0, n + 1).into_owned(), x: u.rows(n + 1, n).into_owned() })
    }

    pub fn to_point(&self) -> CVector {
        let n = self.x.len();
        let mut z = CVector::zeros(2 * n + 2);
        z.rows_mut(0, n + 1).copy_from(&self.zeta);
        z.rows_mut(n + 1, n).copy_from(&self.x);
        z[2 * n + 1] = linalg::ONE;
        z
    }

    /// (1 + ‖x‖²)^{−2(n+1)}
    pub fn density(&self) -> f64 {
        let n = self.x.len() as i32;
        (1.0 + self.x.norm_squared()).powi(-2 * (n + 1))
    }

    fn coords(&self) -> CVector {
        let n = self.x.len();
        let mut u = CVector::zeros(2 * n + 1);
        u.rows_mut(0, n + 1).copy_from(&self.zeta);
        u.rows_mut(n + 1, n).copy_from(&self.x);
        u
    }

    fn from_coords(u: &CVector) -> Self {
        let n = (u.len() - 1) / 2;
        Self { zeta: u.rows(0, n + 1).into_owned(), x: u.rows(n + 1, n).into_owned() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VolumeCheck {
    /// Density ratio of g*dV to dV from a central-difference Jacobian.
    pub lhs: f64,
    /// μ_g(z)^{4(n+1)}
    pub rhs: f64,
    pub rel_err: f64,
    /// The same ratio with the Jacobian determinant taken in closed form,
    /// |c_n·ζ + d_n·x̃|^{−4(n+1)} for the last rows of C and D.
    pub analytic: f64,
}

fn chart_image(g: &ProjectiveMap, u: &CVector) -> Result<CVector> {
    let chart = VolumeChart::from_coords(u);
    let image = g.apply(&chart.to_point());
    Ok(VolumeChart::from_point(&image)?.coords())
}

pub fn volume_pullback_check(g: &ProjectiveMap, at: &VolumeChart, h: f64) -> Result<VolumeCheck> {
    let n = g.n();
    if at.zeta.len() != n + 1 || at.x.len() != n {
        return Err(Error::Usage(format!("chart point must have {} ζ and {} x coordinates", n + 1, n)));
    }
    if !(h > 0.0) {
        return Err(Error::Usage("finite-difference step must be positive".into()));
    }
    let u = at.coords();
    let image = VolumeChart::from_coords(&chart_image(g, &u)?);
    let dim = u.len();
    let mut jac = CMatrix::zeros(dim, dim);
    for j in 0..dim {
        let mut plus = u.clone();
        let mut minus = u.clone();
        plus[j] += h;
        minus[j] -= h;
        let col = (chart_image(g, &plus)? - chart_image(g, &minus)?) / linalg::c(2.0 * h, 0.0);
        jac.set_column(j, &col);
    }
    let det = linalg::det(&jac).norm();
    let lhs = image.density() * det * det / at.density();

    let tol = Tolerances::default();
    let mu = mu_raw(g, &at.to_point(), &tol);
    let rhs = mu.powi(4 * (n as i32 + 1));

    // The chart image divides by the last row of [C D] applied to (ζ, x̃).
    let k = n + 1;
    let last_row = g.rep().row(2 * n + 1).into_owned();
    let den = (last_row * at.to_point())[(0, 0)].norm() * g.log_scale().exp();
    let analytic = image.density() * den.powi(-4 * k as i32) / at.density();

    let rel_err = (lhs - rhs).abs() / rhs.abs().max(f64::MIN_POSITIVE);
    Ok(VolumeCheck { lhs, rhs, rel_err, analytic })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeparationRow {
    pub word: Word,
    pub length: usize,
    /// ‖C_g L_λ + D_g‖ for the unimodular representative.
    pub value: f64,
}

/// ‖C_g L_λ + D_g‖ over all words of length ≤ L, identity included, in
/// enumeration order.
pub fn limit_line_separation(
    spec: &GroupSpec,
    l_lambda: &CMatrix,
    max_length: usize,
) -> Result<Vec<SeparationRow>> {
    let k = spec.n + 1;
    if l_lambda.shape() != (k, k) {
        return Err(Error::Usage(format!("L_λ must be {k}×{k}")));
    }
    let framed = spec.framed();
    let enumeration = framed.enumerate(max_length)?;
    Ok(enumeration
        .elements
        .par_iter()
        .map(|e| {
            let m = e.map.c() * l_lambda + e.map.d();
            SeparationRow {
                word: e.map.word().clone(),
                length: e.length,
                value: linalg::op_norm(&m) * e.map.log_scale().exp(),
            }
        })
        .collect())
}

/// Minimum of each shell of a separation table.
pub fn separation_shell_minima(rows: &[SeparationRow]) -> Vec<(usize, f64)> {
    let mut out: Vec<(usize, f64)> = Vec::new();
    for r in rows {
        match out.last_mut() {
            Some((len, v)) if *len == r.length => *v = v.min(r.value),
            _ => out.push((r.length, r.value)),
        }
    }
    out
}

/// Point of Σ_g: z′ = (C⁻¹U − C⁻¹D)η, z″ = η for a unitary U, so that
/// C z′ + D z″ = Uη has the same norm as z″.
pub fn sigma_point(g: &ProjectiveMap, u: &CMatrix, eta: &CVector, tol: &Tolerances) -> Result<CVector> {
    let k = g.n() + 1;
    if c_inverse_norm_scaled(&g.c(), g.log_scale(), tol).is_infinite() {
        return Err(Error::CSingular { word: g.word().clone() });
    }
    let [_, _, c_sl, d_sl] = g.sl_blocks();
    let c_inv = linalg::inverse(&c_sl).ok_or(Error::CSingular { word: g.word().clone() })?;
    let z_prime = (&c_inv * u - &c_inv * d_sl) * eta;
    let mut z = CVector::zeros(2 * k);
    z.rows_mut(0, k).copy_from(&z_prime);
    z.rows_mut(k, k).copy_from(eta);
    Ok(z)
}
