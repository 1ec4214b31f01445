//! JSON group configuration.
//!
//! ```json
//! {
//!   "n": 1,
//!   "generators": [[[[2, 0], [0, 0], ...], ...]],
//!   "names": ["g"],
//!   "structure": {"kind": "cyclic"},
//!   "frame": [[...]],
//!   "max_words": 100000
//! }
//! ```
//!
//! Matrix entries are `[re, im]` pairs or bare reals. A `"preset"` string
//! replaces `n`, `generators` and `names`; `frame`, `max_words` and
//! `syllable_length` still apply on top of it.

use std::path::Path;

use kleinian_core::constructions::mobius::MobiusGroup;
use kleinian_core::constructions::reps::Representation;
use kleinian_core::group::{GroupSpec, Structure};
use kleinian_core::linalg::{c, CMatrix, C64};
use kleinian_core::Tolerances;
use serde::Deserialize;

use crate::error::{CliError, CliResult};
use crate::preset::parse_preset;

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Pair([f64; 2]),
    Real(f64),
}

impl Entry {
    fn value(self) -> C64 {
        match self {
            Entry::Pair([re, im]) => c(re, im),
            Entry::Real(re) => c(re, 0.0),
        }
    }
}

pub type MatrixJson = Vec<Vec<Entry>>;

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupConfigFile {
    pub n: Option<usize>,
    #[serde(default)]
    pub generators: Vec<MatrixJson>,
    #[serde(default)]
    pub names: Vec<String>,
    pub structure: Option<Structure>,
    pub frame: Option<MatrixJson>,
    pub preset: Option<String>,
    pub max_words: Option<usize>,
    pub syllable_length: Option<usize>,
}

/// A validated group together with where it came from.
pub struct LoadedGroup {
    pub spec: GroupSpec,
    pub mobius: Option<(MobiusGroup, Representation)>,
    pub label: String,
}

fn matrix(what: &str, rows: &MatrixJson, dim: usize) -> CliResult<CMatrix> {
    if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
        let widths: Vec<usize> = rows.iter().map(Vec::len).collect();
        return Err(CliError::Input(format!(
            "{what} must be {dim}×{dim}, got {} rows of lengths {widths:?}",
            rows.len()
        )));
    }
    Ok(CMatrix::from_fn(dim, dim, |i, j| rows[i][j].value()))
}

/// Parses config text; `origin` prefixes positioned error messages.
pub fn parse_config(text: &str, origin: &str) -> CliResult<GroupConfigFile> {
    serde_json::from_str(text)
        .map_err(|e| CliError::Input(format!("{origin}:{}:{}: {e}", e.line(), e.column())))
}

impl GroupConfigFile {
    pub fn build(&self, label: &str, tol: &Tolerances) -> CliResult<LoadedGroup> {
        let (mut spec, mobius) = match &self.preset {
            Some(p) => {
                if !self.generators.is_empty() || self.n.is_some() {
                    return Err(CliError::Input(format!(
                        "{label}: `preset` cannot be combined with `n` or `generators`"
                    )));
                }
                let preset = parse_preset(p, tol)?;
                (preset.spec, preset.mobius)
            }
            None => (self.explicit(label, tol)?, None),
        };
        if let Some(frame) = &self.frame {
            let t = matrix("frame", frame, 2 * spec.n + 2)?;
            spec = spec.with_frame(t)?;
        }
        if let Some(m) = self.max_words {
            spec.max_words = m;
        }
        if let Some(s) = self.syllable_length {
            spec.syllable_length = s;
        }
        Ok(LoadedGroup { spec, mobius, label: label.to_string() })
    }

    fn explicit(&self, label: &str, tol: &Tolerances) -> CliResult<GroupSpec> {
        let n = self
            .n
            .ok_or_else(|| CliError::Input(format!("{label}: missing `n` (or a `preset`)")))?;
        if n == 0 {
            return Err(CliError::Input(format!("{label}: n must be at least 1")));
        }
        if self.generators.is_empty() {
            return Err(CliError::Input(format!("{label}: generator list is empty")));
        }
        if !self.names.is_empty() && self.names.len() != self.generators.len() {
            return Err(CliError::Input(format!(
                "{label}: {} names for {} generators",
                self.names.len(),
                self.generators.len()
            )));
        }
        let dim = 2 * n + 2;
        let mut gens = Vec::with_capacity(self.generators.len());
        for (k, g) in self.generators.iter().enumerate() {
            let name = self.names.get(k).cloned().unwrap_or_else(|| format!("g{k}"));
            let m = matrix(&format!("generator {k} ({name})"), g, dim)?;
            gens.push((name, m));
        }
        let structure = self.structure.clone().unwrap_or(if gens.len() == 1 {
            Structure::Cyclic
        } else {
            Structure::Free
        });
        GroupSpec::new(n, gens, structure, tol).map_err(|e| CliError::Input(format!("{label}: {e}")))
    }
}

pub fn load_config(path: &Path, tol: &Tolerances) -> CliResult<LoadedGroup> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let label = path.display().to_string();
    parse_config(&text, &label)?.build(&label, tol)
}

/// Resolves `--config` / `--preset`; exactly one must be given.
pub fn resolve_group(config: Option<&Path>, preset: Option<&str>, tol: &Tolerances) -> CliResult<LoadedGroup> {
    match (config, preset) {
        (Some(path), None) => load_config(path, tol),
        (None, Some(p)) => {
            let file = GroupConfigFile { preset: Some(p.to_string()), ..Default::default() };
            file.build(&format!("preset {p}"), tol)
        }
        _ => Err(CliError::Input("give exactly one of --config or --preset".into())),
    }
}
