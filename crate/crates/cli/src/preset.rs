//! Named example groups.
//!
//! ```text
//! preset  := kind [":" args]
//! twisted-cubic:<mobius>        mobius := "" | "schottky" | "schottky(" d ")"
//! segre:<mobius>                        | "(" c "," c "," c "," c ")" (";" ...)*
//! schottky:<a0,a1,..;b0,b1,..>  diagonals of A and B
//! cone:<alpha,p,q,r>
//! klein:<preset>|<preset>|<r>
//! ```
//!
//! `c` is a complex literal such as `2`, `-0.5i`, `1+2i` or `3e-1-4i`.
//! Empty arguments select the defaults listed on each constructor.

use kleinian_core::constructions::cone::cone_example;
use kleinian_core::constructions::klein::{klein_combine, KrOptions};
use kleinian_core::constructions::mobius::{default_classical_schottky, Mobius, MobiusGroup};
use kleinian_core::constructions::reps::{represent, Representation};
use kleinian_core::constructions::schottky::schottky_group;
use kleinian_core::group::GroupSpec;
use kleinian_core::linalg::{c, CMatrix, CVector, C64};
use kleinian_core::Tolerances;

use crate::error::{CliError, CliResult};

/// Circle separation of the default classical Schottky group.
pub const DEFAULT_SCHOTTKY_D: f64 = 3.0;
/// Word length used to size each Klein factor.
pub const KLEIN_DEPTH: usize = 6;

pub struct Preset {
    pub spec: GroupSpec,
    /// The Möbius group and representation, for presets built from one.
    pub mobius: Option<(MobiusGroup, Representation)>,
}

fn bad(preset: &str, msg: impl std::fmt::Display) -> CliError {
    CliError::Input(format!("preset `{preset}`: {msg}"))
}

pub fn parse_complex(s: &str) -> Option<C64> {
    let s: String = s.chars().filter(|ch| !ch.is_whitespace()).collect();
    if s.is_empty() {
        return None;
    }
    let Some(body) = s.strip_suffix('i') else {
        return s.parse::<f64>().ok().map(|re| c(re, 0.0));
    };
    // Split before the last sign that is not the leading sign or an exponent sign.
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(k) => (&body[..k], &body[k..]),
        None => ("0", body),
    };
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        other => other.parse::<f64>().ok()?,
    };
    Some(c(re.parse::<f64>().ok()?, im))
}

fn complex_list(preset: &str, s: &str) -> CliResult<Vec<C64>> {
    s.split(',')
        .map(|t| parse_complex(t).ok_or_else(|| bad(preset, format!("bad complex number `{}`", t.trim()))))
        .collect()
}

fn mobius_group(preset: &str, args: &str) -> CliResult<MobiusGroup> {
    let args = args.trim();
    if args.is_empty() || args == "schottky" {
        return Ok(default_classical_schottky(DEFAULT_SCHOTTKY_D)?);
    }
    if let Some(d) = args.strip_prefix("schottky(").and_then(|r| r.strip_suffix(')')) {
        let d: f64 = d.trim().parse().map_err(|_| bad(preset, format!("bad separation `{d}`")))?;
        return Ok(default_classical_schottky(d)?);
    }
    let mut gens = Vec::new();
    for (k, item) in args.split(';').enumerate() {
        let inner = item
            .trim()
            .strip_prefix('(')
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(|| bad(preset, format!("expected (a,b,c,d), got `{}`", item.trim())))?;
        let v = complex_list(preset, inner)?;
        if v.len() != 4 {
            return Err(bad(preset, format!("Möbius map needs 4 entries, got {}", v.len())));
        }
        gens.push((format!("g{k}"), Mobius::new(v[0], v[1], v[2], v[3])?));
    }
    Ok(MobiusGroup::new(gens))
}

fn diag(v: &[C64]) -> CMatrix {
    CMatrix::from_diagonal(&CVector::from_column_slice(v))
}

fn schottky(preset: &str, args: &str, tol: &Tolerances) -> CliResult<GroupSpec> {
    let args = args.trim();
    let (a, b) = if args.is_empty() {
        (vec![c(0.5, 0.0), c(1.0 / 3.0, 0.0)], vec![c(2.0, 0.0), c(3.0, 0.0)])
    } else {
        let (a, b) = args
            .split_once(';')
            .ok_or_else(|| bad(preset, "expected <diag A>;<diag B>"))?;
        (complex_list(preset, a)?, complex_list(preset, b)?)
    };
    if a.len() != b.len() || a.len() < 2 {
        return Err(bad(preset, "A and B need the same number (at least 2) of diagonal entries"));
    }
    Ok(schottky_group(&diag(&a), &diag(&b), tol)?)
}

fn cone(preset: &str, args: &str, tol: &Tolerances) -> CliResult<GroupSpec> {
    let v = if args.trim().is_empty() {
        vec![c(2.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0)]
    } else {
        complex_list(preset, args)?
    };
    if v.len() != 4 {
        return Err(bad(preset, format!("expected alpha,p,q,r, got {} values", v.len())));
    }
    Ok(cone_example(v[0], v[1], v[2], v[3], tol)?.spec)
}

fn klein(preset: &str, args: &str, tol: &Tolerances) -> CliResult<GroupSpec> {
    let (p1, p2, r) = if args.trim().is_empty() {
        ("schottky:0.5,0.5;2,2", "schottky:0.3333333333333333,0.25;3,4", "0.1")
    } else {
        let parts: Vec<&str> = args.split('|').collect();
        let [p1, p2, r] = parts[..] else {
            return Err(bad(preset, "expected <preset>|<preset>|<r>"));
        };
        (p1, p2, r)
    };
    let r: f64 = r.trim().parse().map_err(|_| bad(preset, format!("bad radius `{}`", r.trim())))?;
    let f1 = parse_preset(p1.trim(), tol)?.spec;
    let f2 = parse_preset(p2.trim(), tol)?.spec;
    Ok(klein_combine(&f1, &f2, r, KLEIN_DEPTH, &KrOptions::default(), tol)?.spec)
}

pub fn parse_preset(preset: &str, tol: &Tolerances) -> CliResult<Preset> {
    let (kind, args) = preset.split_once(':').unwrap_or((preset, ""));
    let plain = |spec| Ok(Preset { spec, mobius: None });
    match kind.trim() {
        "twisted-cubic" | "segre" => {
            let rep = if kind.trim() == "segre" { Representation::Segre } else { Representation::TwistedCubic };
            let group = mobius_group(preset, args)?;
            let spec = represent(&group, rep, tol)?;
            Ok(Preset { spec, mobius: Some((group, rep)) })
        }
        "schottky" => plain(schottky(preset, args, tol)?),
        "cone" => plain(cone(preset, args, tol)?),
        "klein" => plain(klein(preset, args, tol)?),
        other => Err(bad(
            preset,
            format!("unknown kind `{other}` (expected twisted-cubic, segre, schottky, cone or klein)"),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_literals() {
        let cases = [
            ("2", c(2.0, 0.0)),
            ("-0.5i", c(0.0, -0.5)),
            ("i", c(0.0, 1.0)),
            ("-i", c(0.0, -1.0)),
            ("1+2i", c(1.0, 2.0)),
            ("3e-1-4i", c(0.3, -4.0)),
            ("-1e2+1e-2i", c(-100.0, 0.01)),
            (" 1 - i ", c(1.0, -1.0)),
        ];
        for (s, want) in cases {
            assert_eq!(parse_complex(s), Some(want), "{s}");
        }
        for s in ["", "x", "1+", "2j", "1+2i+3i"] {
            assert_eq!(parse_complex(s), None, "{s}");
        }
    }

    #[test]
    fn presets_build() {
        let tol = Tolerances::default();
        let cases = [
            ("twisted-cubic", 2),
            ("twisted-cubic:schottky(4)", 2),
            ("segre:(2,0,0,0.5)", 1),
            ("schottky", 1),
            ("schottky:0.5,0.25,0.2;2,4,5", 1),
            ("cone:2,1,0,1", 1),
            ("klein", 2),
        ];
        for (p, gens) in cases {
            let spec = parse_preset(p, &tol).unwrap_or_else(|e| panic!("{p}: {e}")).spec;
            assert_eq!(spec.generators.len(), gens, "{p}");
        }
        assert_eq!(parse_preset("schottky:0.5,0.25,0.2;2,4,5", &tol).unwrap().spec.n, 2);
    }

    #[test]
    fn bad_presets_are_input_errors() {
        let tol = Tolerances::default();
        for p in ["hyperbolic", "cone:0.5,1,1,1", "schottky:2,2;0.5,0.5", "segre:(1,2,3)", "klein:schottky|0.1"] {
            assert!(matches!(parse_preset(p, &tol), Err(CliError::Input(_))), "{p}");
        }
    }
}
