//! Projective maps, words in generators, and breadth-first enumeration of
//! reduced words.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, CVector};
use crate::planes::NPlane;
use crate::tol::Tolerances;

/// Words longer than this are re-multiplied from the generators instead of
/// extending the parent's matrix.
const REBUILD_AFTER: usize = 32;

/// Largest order checked when flagging finite-order generators.
const TORSION_ORDER: u32 = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Letter {
    pub generator: usize,
    pub inverse: bool,
}

impl Letter {
    pub fn new(generator: usize, inverse: bool) -> Self {
        Self { generator, inverse }
    }

    pub fn inv(self) -> Self {
        Self { generator: self.generator, inverse: !self.inverse }
    }
}

/// Word in the generators, read left to right as a matrix product.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Word(pub Vec<Letter>);

impl Word {
    pub fn identity() -> Self {
        Self(Vec::new())
    }

    pub fn letter(generator: usize, inverse: bool) -> Self {
        Self(vec![Letter::new(generator, inverse)])
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn inverse(&self) -> Self {
        Self(self.0.iter().rev().map(|l| l.inv()).collect())
    }

    /// Concatenation followed by free reduction at the junction.
    pub fn concat(&self, other: &Word) -> Word {
        let mut out = self.0.clone();
        for &l in &other.0 {
            if out.last() == Some(&l.inv()) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Word(out)
    }

    pub fn is_reduced(&self) -> bool {
        self.0.windows(2).all(|w| w[0] != w[1].inv())
    }

    /// `g0 g1^-1`-style rendering with the given generator names.
    pub fn render(&self, names: &[String]) -> String {
        if self.0.is_empty() {
            return "1".to_string();
        }
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|l| {
                let name = names
                    .get(l.generator)
                    .cloned()
                    .unwrap_or_else(|| format!("g{}", l.generator));
                if l.inverse {
                    format!("{name}^-1")
                } else {
                    name
                }
            })
            .collect();
        parts.join(" ")
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(&[]))
    }
}

/// Element of PGL_{2n+2}(ℂ).
///
/// `rep` has largest entry 1 (real positive); the unimodular representative
/// is e^{log_scale}·rep up to a root of unity.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectiveMap {
    n: usize,
    rep: CMatrix,
    log_scale: f64,
    word: Word,
}

/// Scales a square matrix so its largest entry is 1 and real positive.
pub fn normalize(m: &CMatrix, tol: &Tolerances) -> Result<CMatrix> {
    Ok(ProjectiveMap::from_matrix(m, tol)?.rep)
}

impl ProjectiveMap {
    pub fn from_matrix(m: &CMatrix, tol: &Tolerances) -> Result<Self> {
        Self::with_word(m, Word::identity(), tol)
    }

    pub fn with_word(m: &CMatrix, word: Word, tol: &Tolerances) -> Result<Self> {
        let (r, c) = m.shape();
        if r != c || r < 4 || r % 2 != 0 {
            return Err(Error::Usage(format!(
                "group elements must be square of even size ≥ 4, got {r}×{c}"
            )));
        }
        if !m.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::Usage("matrix has non-finite entries".into()));
        }
        let (rep, _) =
            linalg::normalize_matrix(m).ok_or(Error::NotAGroupElement { det_abs: 0.0 })?;
        let det_abs = linalg::det(&rep).norm();
        let sv = linalg::singular_values(&rep);
        let (top, bottom) = (sv[0], sv[sv.len() - 1]);
        if !(bottom > tol.singular * top) || !(det_abs > 0.0) {
            return Err(Error::NotAGroupElement { det_abs: det_abs * linalg::max_abs(m.iter()).powi(r as i32) });
        }
        Ok(Self { n: r / 2 - 1, rep, log_scale: -det_abs.ln() / r as f64, word })
    }

    pub fn identity(n: usize) -> Self {
        let dim = 2 * n + 2;
        Self { n, rep: CMatrix::identity(dim, dim), log_scale: 0.0, word: Word::identity() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        2 * self.n + 2
    }

    pub fn rep(&self) -> &CMatrix {
        &self.rep
    }

    pub fn log_scale(&self) -> f64 {
        self.log_scale
    }

    pub fn word(&self) -> &Word {
        &self.word
    }

    pub fn with_word_label(mut self, word: Word) -> Self {
        self.word = word;
        self
    }

    /// Unimodular representative. May overflow for very long words; prefer
    /// the scaled block accessors.
    pub fn sl_matrix(&self) -> CMatrix {
        self.rep.scale(self.log_scale.exp())
    }

    fn block(&self, r: usize, c: usize) -> CMatrix {
        let k = self.n + 1;
        self.rep.view((r * k, c * k), (k, k)).into_owned()
    }

    /// Blocks of `rep` = [[A, B], [C, D]].
    pub fn a(&self) -> CMatrix {
        self.block(0, 0)
    }
    pub fn b(&self) -> CMatrix {
        self.block(0, 1)
    }
    pub fn c(&self) -> CMatrix {
        self.block(1, 0)
    }
    pub fn d(&self) -> CMatrix {
        self.block(1, 1)
    }

    /// (A, B, C, D) of the unimodular representative.
    pub fn sl_blocks(&self) -> [CMatrix; 4] {
        let s = self.log_scale.exp();
        [self.a().scale(s), self.b().scale(s), self.c().scale(s), self.d().scale(s)]
    }

    /// self ∘ other, with the words concatenated and reduced.
    pub fn compose(&self, other: &ProjectiveMap) -> ProjectiveMap {
        let prod = &self.rep * &other.rep;
        let (rep, s) = linalg::normalize_matrix(&prod)
            .expect("product of invertible matrices is nonzero");
        ProjectiveMap {
            n: self.n,
            rep,
            log_scale: self.log_scale + other.log_scale + s.ln(),
            word: self.word.concat(&other.word),
        }
    }

    pub fn inverse(&self) -> ProjectiveMap {
        let inv = linalg::inverse(&self.rep).expect("group elements are invertible");
        let (rep, s) = linalg::normalize_matrix(&inv).expect("inverse is nonzero");
        ProjectiveMap { n: self.n, rep, log_scale: -self.log_scale + s.ln(), word: self.word.inverse() }
    }

    /// g^k by repeated squaring (k may be negative).
    pub fn pow(&self, k: i64) -> ProjectiveMap {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut e = k.unsigned_abs();
        let mut acc = ProjectiveMap::identity(self.n);
        let mut sq = base.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.compose(&sq);
            }
            e >>= 1;
            if e > 0 {
                sq = sq.compose(&sq);
            }
        }
        let repeated = base.word.0.repeat(k.unsigned_abs() as usize);
        acc.word = Word::identity().concat(&Word(repeated));
        acc
    }

    /// T g T⁻¹.
    pub fn conjugate_by(&self, t: &CMatrix, t_inv: &CMatrix) -> ProjectiveMap {
        let m = t * &self.rep * t_inv;
        let (rep, s) = linalg::normalize_matrix(&m).expect("conjugate is nonzero");
        ProjectiveMap { n: self.n, rep, log_scale: self.log_scale + s.ln(), word: self.word.clone() }
    }

    /// Homogeneous image g·z (not normalized).
    pub fn apply(&self, z: &CVector) -> CVector {
        &self.rep * z
    }

    /// True when the rep is the identity up to phase.
    pub fn is_identity(&self, tol: &Tolerances) -> bool {
        let eye = CMatrix::identity(self.dim(), self.dim());
        linalg::phase_aligned_max_diff(&self.rep, &eye) <= tol.identity
    }

    /// ‖C_g⁻¹‖ for the unimodular representative; +∞ when C_g is singular.
    pub fn c_inverse_norm(&self, tol: &Tolerances) -> Result<f64> {
        if self.word.is_empty() && self.is_identity(tol) {
            return Err(Error::Usage("‖C⁻¹‖ is undefined for the identity".into()));
        }
        Ok(c_inverse_norm_scaled(&self.c(), self.log_scale, tol))
    }
}

/// e^{−ls}/σ_min(C), or +∞ when σ_min ≤ singular·σ_max.
pub(crate) fn c_inverse_norm_scaled(c: &CMatrix, log_scale: f64, tol: &Tolerances) -> f64 {
    let sv = linalg::singular_values(c);
    let top = sv.first().copied().unwrap_or(0.0);
    let bottom = sv.last().copied().unwrap_or(0.0);
    if !(top > 0.0) || bottom <= tol.singular * top {
        f64::INFINITY
    } else {
        (-log_scale).exp() / bottom
    }
}

/// Identity of `c_inverse_norm` as a free function.
pub fn c_inverse_norm(g: &ProjectiveMap, tol: &Tolerances) -> Result<f64> {
    g.c_inverse_norm(tol)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind", content = "factors")]
pub enum Structure {
    Free,
    Cyclic,
    /// Free product of free factors; entries are the generator counts of
    /// consecutive factors.
    FreeProduct(Vec<usize>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Generator {
    pub name: String,
    pub map: ProjectiveMap,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroupSpec {
    pub n: usize,
    pub generators: Vec<Generator>,
    pub structure: Structure,
    /// Coordinate change w = T z in which Ford quantities are evaluated.
    pub frame: Option<CMatrix>,
    pub max_words: usize,
    /// Longest syllable (letters within one factor) for free products.
    pub syllable_length: usize,
}

pub const DEFAULT_MAX_WORDS: usize = 1_000_000;

impl GroupSpec {
    pub fn new(
        n: usize,
        generators: Vec<(String, CMatrix)>,
        structure: Structure,
        tol: &Tolerances,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::Usage("n must be at least 1".into()));
        }
        let dim = 2 * n + 2;
        let mut gens = Vec::with_capacity(generators.len());
        for (i, (name, m)) in generators.into_iter().enumerate() {
            if m.shape() != (dim, dim) {
                return Err(Error::Usage(format!(
                    "generator {name} is {}×{}, expected {dim}×{dim}",
                    m.nrows(),
                    m.ncols()
                )));
            }
            let map = ProjectiveMap::with_word(&m, Word::letter(i, false), tol)?;
            gens.push(Generator { name, map });
        }
        let spec = Self {
            n,
            generators: gens,
            structure,
            frame: None,
            max_words: DEFAULT_MAX_WORDS,
            syllable_length: 2,
        };
        spec.check_structure()?;
        Ok(spec)
    }

    pub fn with_frame(mut self, frame: CMatrix) -> Result<Self> {
        let dim = 2 * self.n + 2;
        if frame.shape() != (dim, dim) || linalg::inverse(&frame).is_none() {
            return Err(Error::Usage(format!("frame must be an invertible {dim}×{dim} matrix")));
        }
        self.frame = Some(frame);
        Ok(self)
    }

    fn check_structure(&self) -> Result<()> {
        match &self.structure {
            Structure::Free => Ok(()),
            Structure::Cyclic if self.generators.len() == 1 => Ok(()),
            Structure::Cyclic => Err(Error::Usage(format!(
                "cyclic structure needs exactly one generator, got {}",
                self.generators.len()
            ))),
            Structure::FreeProduct(sizes) => {
                if sizes.contains(&0) || sizes.iter().sum::<usize>() != self.generators.len() {
                    Err(Error::Usage(format!(
                        "free-product factor sizes {sizes:?} do not partition {} generators",
                        self.generators.len()
                    )))
                } else {
                    Ok(())
                }
            }
        }
    }

    pub fn names(&self) -> Vec<String> {
        self.generators.iter().map(|g| g.name.clone()).collect()
    }

    /// Copy with generators conjugated into the frame and no frame left.
    pub fn framed(&self) -> GroupSpec {
        let Some(t) = &self.frame else {
            return self.clone();
        };
        let t_inv = linalg::inverse(t).expect("frame checked invertible");
        let generators = self
            .generators
            .iter()
            .map(|g| Generator { name: g.name.clone(), map: g.map.conjugate_by(t, &t_inv) })
            .collect();
        GroupSpec { generators, frame: None, ..self.clone() }
    }

    /// Indices of generators with g^k ≈ 1 for some k ≤ 12.
    pub fn torsion_generators(&self, tol: &Tolerances) -> Vec<usize> {
        let loose = Tolerances { identity: tol.identity.max(1e-8), ..*tol };
        self.generators
            .iter()
            .enumerate()
            .filter(|(_, g)| {
                let mut p = g.map.clone();
                (1..=TORSION_ORDER).any(|k| {
                    if k > 1 {
                        p = p.compose(&g.map);
                    }
                    p.is_identity(&loose)
                })
            })
            .map(|(i, _)| i)
            .collect()
    }

    fn factor_of(&self) -> Vec<usize> {
        match &self.structure {
            Structure::FreeProduct(sizes) => sizes
                .iter()
                .enumerate()
                .flat_map(|(f, &s)| std::iter::repeat_n(f, s))
                .collect(),
            _ => vec![0; self.generators.len()],
        }
    }

    /// Map of a word, multiplied along a balanced tree.
    pub fn evaluate(&self, word: &Word) -> ProjectiveMap {
        fn rec(spec: &GroupSpec, letters: &[Letter]) -> ProjectiveMap {
            match letters.len() {
                0 => ProjectiveMap::identity(spec.n),
                1 => {
                    let l = letters[0];
                    let g = &spec.generators[l.generator].map;
                    if l.inverse {
                        g.inverse()
                    } else {
                        g.clone()
                    }
                }
                len => {
                    let (a, b) = letters.split_at(len / 2);
                    rec(spec, a).compose(&rec(spec, b))
                }
            }
        }
        rec(self, word.letters()).with_word_label(word.clone())
    }

    /// Image of a plane under a word, applied one letter at a time. The
    /// product matrix of a long word is numerically rank one, so mapping a
    /// basis through it would lose the plane.
    pub fn word_image(&self, word: &Word, plane: &NPlane, tol: &Tolerances) -> Result<NPlane> {
        let mut out = plane.clone();
        for l in word.letters().iter().rev() {
            let g = &self.generators[l.generator].map;
            let m = if l.inverse { g.inverse() } else { g.clone() };
            out = out.transform(m.rep(), tol)?;
        }
        Ok(out)
    }

    /// All reduced words of length ≤ L, breadth first. Length counts letters
    /// for free and cyclic groups and syllables for free products.
    pub fn enumerate(&self, max_length: usize) -> Result<Enumeration> {
        let steps = self.steps();
        let min_children = self.min_children(&steps).max(1);
        let mut elements = vec![Element {
            map: ProjectiveMap::identity(self.n),
            length: 0,
            last_factor: None,
        }];
        let mut frontier_start = 0;
        for length in 1..=max_length {
            let frontier = &elements[frontier_start..];
            if frontier.is_empty() || steps.is_empty() {
                break;
            }
            let room = self.max_words.saturating_sub(elements.len());
            // Only expand as many parents as can fit, so an oversized level
            // is never materialized.
            let parents = frontier.len().min(room / min_children + 1);
            let complete = parents == frontier.len();
            let level: Vec<Element> = frontier[..parents]
                .par_iter()
                .map(|parent| self.children(parent, &steps, length))
                .collect::<Vec<_>>()
                .into_iter()
                .flatten()
                .collect();
            let next_start = elements.len();
            elements.extend(level);
            if !complete || elements.len() > self.max_words {
                elements.truncate(self.max_words);
                return Err(Error::BudgetExceeded {
                    limit: self.max_words,
                    partial: Box::new(Enumeration { elements, truncated: true }),
                });
            }
            frontier_start = next_start;
        }
        Ok(Enumeration { elements, truncated: false })
    }

    fn children(&self, parent: &Element, steps: &[Step], length: usize) -> Vec<Element> {
        let last = parent.map.word.letters().last().copied();
        steps
            .iter()
            .filter(|s| match &self.structure {
                Structure::FreeProduct(_) => parent.last_factor != Some(s.factor),
                _ => last != Some(s.word.letters()[0].inv()),
            })
            .map(|s| {
                let word = parent.map.word.concat(&s.word);
                let map = if word.len() > REBUILD_AFTER {
                    self.evaluate(&word)
                } else {
                    parent.map.compose(&s.map)
                };
                debug_assert_eq!(map.word, word);
                Element { map, length, last_factor: Some(s.factor) }
            })
            .collect()
    }

    /// Fewest children any non-identity element can have.
    fn min_children(&self, steps: &[Step]) -> usize {
        match &self.structure {
            Structure::FreeProduct(sizes) => (0..sizes.len())
                .map(|f| steps.iter().filter(|s| s.factor != f).count())
                .min()
                .unwrap_or(0),
            _ => steps.len().saturating_sub(1),
        }
    }

    /// One-step extensions: single letters, or whole syllables for free
    /// products.
    fn steps(&self) -> Vec<Step> {
        let factor_of = self.factor_of();
        let letters: Vec<(Letter, ProjectiveMap)> = self
            .generators
            .iter()
            .enumerate()
            .flat_map(|(i, g)| {
                [(Letter::new(i, false), g.map.clone()), (Letter::new(i, true), g.map.inverse())]
            })
            .collect();
        match &self.structure {
            Structure::FreeProduct(sizes) => {
                let mut steps = Vec::new();
                for f in 0..sizes.len() {
                    let own: Vec<&(Letter, ProjectiveMap)> = letters
                        .iter()
                        .filter(|(l, _)| factor_of[l.generator] == f)
                        .collect();
                    // Reduced words within the factor, by length.
                    let mut layer: Vec<ProjectiveMap> = vec![ProjectiveMap::identity(self.n)];
                    for _ in 0..self.syllable_length.max(1) {
                        let mut next = Vec::new();
                        for w in &layer {
                            for (l, m) in &own {
                                if w.word.letters().last() == Some(&l.inv()) {
                                    continue;
                                }
                                next.push(w.compose(m));
                            }
                        }
                        steps.extend(next.iter().map(|m| Step {
                            word: m.word.clone(),
                            map: m.clone(),
                            factor: f,
                        }));
                        layer = next;
                    }
                }
                steps
            }
            _ => letters
                .into_iter()
                .map(|(l, m)| Step { word: Word(vec![l]), map: m, factor: 0 })
                .collect(),
        }
    }
}

struct Step {
    word: Word,
    map: ProjectiveMap,
    factor: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Element {
    pub map: ProjectiveMap,
    /// Letters (free, cyclic) or syllables (free product).
    pub length: usize,
    pub last_factor: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Enumeration {
    pub elements: Vec<Element>,
    pub truncated: bool,
}

impl Enumeration {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Elements with the given length.
    pub fn shell(&self, length: usize) -> impl Iterator<Item = &Element> {
        self.elements.iter().filter(move |e| e.length == length)
    }

    pub fn max_length(&self) -> usize {
        self.elements.iter().map(|e| e.length).max().unwrap_or(0)
    }

    pub fn non_identity(&self) -> impl Iterator<Item = &Element> {
        self.elements.iter().filter(|e| e.length > 0)
    }
}

/// Runs `enumerate`, turning a budget overflow into a truncated result when
/// `allow_partial` is set.
pub fn enumerate_words(spec: &GroupSpec, max_length: usize, allow_partial: bool) -> Result<Enumeration> {
    match spec.enumerate(max_length) {
        Err(Error::BudgetExceeded { partial, .. }) if allow_partial => Ok(*partial),
        other => other,
    }
}
