//! Free products of two groups whose F-regions contain a tube around
//! {z″ = 0}, after rescaling by α = diag(aI, a⁻¹I) and moving the second
//! factor across with σ and both into the w-frame with τ.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::constructions::schottky::{swap_frame, tau_frame};
use crate::error::{Error, Result};
use crate::ford::v_r_estimate;
use crate::group::{GroupSpec, Structure, Word};
use crate::linalg::{self, c, CMatrix};
use crate::tol::Tolerances;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KrEstimate {
    pub value: f64,
    /// Random points drawn from the two operator-norm balls.
    pub samples: usize,
    /// Angle grid per axis for the scalar candidates e^{iθ} r I.
    pub angle_grid: usize,
    pub refinement_steps: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KleinCombinationConfig {
    pub r: f64,
    pub a: f64,
    pub rho1: f64,
    pub rho2: f64,
    /// Tube radius with {‖z′‖ ≥ r₁‖z″‖} inside both F-regions.
    pub r1: f64,
    pub k_r: f64,
    pub k_r_estimate: KrEstimate,
    /// Word length used for the factor estimates.
    pub depth: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KleinCombination {
    /// Free product in the w-frame; no further frame is attached.
    pub spec: GroupSpec,
    pub config: KleinCombinationConfig,
    /// Generator count of the first factor.
    pub split: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KrOptions {
    pub samples: usize,
    pub angle_grid: usize,
    pub refinement_steps: usize,
    pub seed: u64,
}

impl Default for KrOptions {
    fn default() -> Self {
        Self { samples: 2000, angle_grid: 24, refinement_steps: 400, seed: 0x4b72 }
    }
}

/// ‖((I+X)(I−X)⁻¹ + (I+Y)(I−Y)⁻¹)⁻¹‖, +∞ when the sum is singular.
pub fn k_r_objective(x: &CMatrix, y: &CMatrix) -> f64 {
    let m = x.nrows();
    let i = linalg::identity(m);
    let cayley = |x: &CMatrix| linalg::inverse(&(&i - x)).map(|inv| (&i + x) * inv);
    let (Some(p), Some(q)) = (cayley(x), cayley(y)) else {
        return f64::INFINITY;
    };
    let sv = linalg::singular_values(&(p + q));
    let smallest = sv.last().copied().unwrap_or(0.0);
    if smallest <= 0.0 {
        f64::INFINITY
    } else {
        1.0 / smallest
    }
}

fn into_ball(x: CMatrix, r: f64) -> CMatrix {
    let norm = linalg::op_norm(&x);
    if norm > r {
        x.scale(r / norm)
    } else {
        x
    }
}

fn random_in_ball(rng: &mut ChaCha8Rng, m: usize, r: f64) -> CMatrix {
    let x = linalg::random_matrix(rng, m, m);
    let norm = linalg::op_norm(&x);
    // half the draws sit on the sphere, where the sup is attained
    let radius = if rng.random_bool(0.5) { r } else { r * rng.random::<f64>() };
    x.scale(radius / norm)
}

/// Sup of [`k_r_objective`] over ‖X‖, ‖Y‖ ≤ r by sampling and hill climbing.
pub fn estimate_k_r(r: f64, m: usize, opts: &KrOptions) -> Result<KrEstimate> {
    if !(0.0..1.0).contains(&r) || m == 0 {
        return Err(Error::Usage(format!("need 0 ≤ r < 1 and m ≥ 1, got r = {r}, m = {m}")));
    }
    let i = linalg::identity(m);
    let mut best = (f64::NEG_INFINITY, CMatrix::zeros(m, m), CMatrix::zeros(m, m));
    let consider = |x: CMatrix, y: CMatrix, best: &mut (f64, CMatrix, CMatrix)| {
        let v = k_r_objective(&x, &y);
        if v > best.0 {
            *best = (v, x, y);
        }
    };
    let grid = opts.angle_grid.max(1);
    for s in 0..grid {
        for t in 0..grid {
            let th = std::f64::consts::TAU * s as f64 / grid as f64;
            let ph = std::f64::consts::TAU * t as f64 / grid as f64;
            consider(&i * c(r * th.cos(), r * th.sin()), &i * c(r * ph.cos(), r * ph.sin()), &mut best);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    for _ in 0..opts.samples {
        let x = random_in_ball(&mut rng, m, r);
        let y = random_in_ball(&mut rng, m, r);
        consider(x, y, &mut best);
    }
    let mut step = 0.1 * r;
    for _ in 0..opts.refinement_steps {
        let dx = linalg::random_matrix(&mut rng, m, m).scale(step);
        let dy = linalg::random_matrix(&mut rng, m, m).scale(step);
        let x = into_ball(&best.1 + dx, r);
        let y = into_ball(&best.2 + dy, r);
        let before = best.0;
        consider(x, y, &mut best);
        if best.0 <= before {
            step *= 0.97;
        }
    }
    Ok(KrEstimate {
        value: best.0,
        samples: opts.samples,
        angle_grid: grid,
        refinement_steps: opts.refinement_steps,
    })
}

fn infeasible(factor: usize, e: Error) -> Error {
    match e {
        Error::CSingular { word } => {
            Error::CombinationInfeasible(format!("factor {factor}: C block is singular for word {word}"))
        }
        other => other,
    }
}

/// Combines two free or cyclic groups, each given in a frame whose F-region
/// contains a tube around {z″ = 0}. The scaling takes the largest a allowed
/// by a² ≤ r/r₁ and a² ≤ 1/ρ_ν, with ρ_ν and r₁ estimated from words of
/// length ≤ `depth`.
pub fn klein_combine(
    spec1: &GroupSpec,
    spec2: &GroupSpec,
    r: f64,
    depth: usize,
    kr: &KrOptions,
    tol: &Tolerances,
) -> Result<KleinCombination> {
    if spec1.n != spec2.n {
        return Err(Error::Usage(format!("factors act on ℂP^{} and ℂP^{}", 2 * spec1.n + 1, 2 * spec2.n + 1)));
    }
    for s in [spec1, spec2] {
        if matches!(s.structure, Structure::FreeProduct(_)) {
            return Err(Error::Usage("factors must be free or cyclic".into()));
        }
    }
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::Usage(format!("r = {r} must lie in (0, 1)")));
    }
    let n = spec1.n;
    let est1 = v_r_estimate(spec1, depth, tol).map_err(|e| infeasible(1, e))?;
    let est2 = v_r_estimate(spec2, depth, tol).map_err(|e| infeasible(2, e))?;
    let r1 = est1.r.max(est2.r);
    if ![r1, est1.rho, est2.rho].iter().all(|v| v.is_finite()) {
        return Err(Error::CombinationInfeasible("factor bounds are not finite".into()));
    }
    let bounds = [r / r1, 1.0 / est1.rho, 1.0 / est2.rho];
    let a2 = bounds.into_iter().fold(f64::INFINITY, f64::min);
    let a2 = if a2.is_infinite() { 1.0 } else { a2 };
    if !(a2 > 0.0) {
        return Err(Error::CombinationInfeasible(format!("no admissible scaling (a² ≤ {a2})")));
    }
    let k_r_estimate = estimate_k_r(r, n + 1, kr)?;
    if !(k_r_estimate.value < 1.0) {
        return Err(Error::CombinationInfeasible(format!(
            "K_r = {} is not below 1 at r = {r}",
            k_r_estimate.value
        )));
    }
    let a = a2.sqrt();
    let i = linalg::identity(n + 1);
    let alpha = linalg::block_diag(&(&i * c(a, 0.0)), &(&i * c(1.0 / a, 0.0)));
    let tau = tau_frame(n);
    let frame_of = |s: &GroupSpec| s.frame.clone().unwrap_or_else(|| linalg::identity(2 * n + 2));
    let m1 = &tau * &alpha * frame_of(spec1);
    let m2 = &tau * swap_frame(n) * &alpha * frame_of(spec2);

    let names1 = spec1.names();
    let names2 = spec2.names();
    let clash = names1.iter().any(|x| names2.contains(x));
    let label = |name: &str, k: usize| if clash { format!("{name}_{k}") } else { name.to_string() };
    let mut gens: Vec<(String, CMatrix)> = Vec::new();
    for (spec, conj, k) in [(spec1, &m1, 1), (spec2, &m2, 2)] {
        let inv = linalg::inverse(conj).expect("conjugator is invertible");
        for g in &spec.generators {
            gens.push((label(&g.name, k), conj * g.map.rep() * &inv));
        }
    }
    let split = spec1.generators.len();
    let sizes = vec![split, spec2.generators.len()];
    let mut spec = GroupSpec::new(n, gens, Structure::FreeProduct(sizes), tol)?;
    spec.syllable_length = spec1.syllable_length.max(spec2.syllable_length);
    spec.max_words = spec1.max_words.min(spec2.max_words);
    let config = KleinCombinationConfig {
        r,
        a,
        rho1: est1.rho,
        rho2: est2.rho,
        r1,
        k_r: k_r_estimate.value,
        k_r_estimate,
        depth,
    };
    Ok(KleinCombination { spec, config, split })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SyllableBoundRow {
    pub word: Word,
    pub syllables: usize,
    pub c_inv_norm: f64,
    /// K_r^{m−1} ∏ ‖C_{g_j}⁻¹‖ over the syllables g_j.
    pub bound: f64,
}

impl SyllableBoundRow {
    pub fn holds(&self, rel: f64) -> bool {
        self.c_inv_norm <= self.bound * (1.0 + rel)
    }
}

/// Splits a word into maximal runs of letters from one factor.
pub fn syllables(word: &Word, split: usize) -> Vec<Word> {
    let mut out: Vec<Word> = Vec::new();
    let mut last = None;
    for &l in word.letters() {
        let f = l.generator >= split;
        if last == Some(f) {
            out.last_mut().expect("run started").0.push(l);
        } else {
            out.push(Word(vec![l]));
            last = Some(f);
        }
    }
    out
}

/// ‖C_f⁻¹‖ against the syllable product bound for every word of syllable
/// length ≤ `max_length`.
pub fn syllable_bound_check(comb: &KleinCombination, max_length: usize, tol: &Tolerances) -> Result<Vec<SyllableBoundRow>> {
    let enumeration = comb.spec.enumerate(max_length)?;
    enumeration
        .non_identity()
        .map(|e| {
            let parts = syllables(e.map.word(), comb.split);
            let mut bound = comb.config.k_r.powi(parts.len() as i32 - 1);
            for part in &parts {
                bound *= comb.spec.evaluate(part).c_inverse_norm(tol)?;
            }
            Ok(SyllableBoundRow {
                word: e.map.word().clone(),
                syllables: parts.len(),
                c_inv_norm: e.map.c_inverse_norm(tol)?,
                bound,
            })
        })
        .collect()
}
