//! Acceptance criteria. Every criterion runs even if an earlier one fails;
//! each prints one PASS/FAIL line with its measurements and runtime.

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use kleinian_cli::preset::parse_preset;
use kleinian_core::constructions::cone::{cone_example, cone_generator, ConeExample};
use kleinian_core::constructions::klein::syllable_bound_check;
use kleinian_core::constructions::mobius::{default_classical_schottky, mobius_fixed_points, Mobius};
use kleinian_core::constructions::reps::{
    printed_size6, represent, segre_limit_line, segre_rep, tangent_line_at, twisted_cubic_matrix,
    twisted_cubic_point, twisted_cubic_rep, Representation,
};
use kleinian_core::constructions::klein::{klein_combine, KrOptions};
use kleinian_core::constructions::mobius::P1Point;
use kleinian_core::constructions::schottky::schottky_group;
use kleinian_core::exterior::{compound, identity_residuals};
use kleinian_core::ford::{club_spade_diagnostics, mu, v_r_estimate, volume_pullback_check, FordRegion, FordStatus, VolumeChart};
use kleinian_core::group::{GroupSpec, ProjectiveMap};
use kleinian_core::limit::limit_nplane_of_powers;
use kleinian_core::linalg::{self, c, random_complex, random_matrix, random_vector, CMatrix, CVector};
use kleinian_core::planes::{intersection_value, plane_distance, planes_intersect, NPlane};
use kleinian_core::{Error, Tolerances};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Criterion = (u32, &'static str, Duration, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn random_mobius(rng: &mut impl Rng) -> Mobius {
    loop {
        if let Ok(g) = Mobius::new(random_complex(rng), random_complex(rng), random_complex(rng), random_complex(rng)) {
            return g;
        }
    }
}

fn larger_eigenvalue_modulus(g: &Mobius) -> f64 {
    let tr = g.trace();
    let disc = (tr * tr - 4.0).sqrt();
    ((tr + disc) / 2.0).norm().max(((tr - disc) / 2.0).norm())
}

fn diag(v: &[f64]) -> CMatrix {
    CMatrix::from_diagonal(&CVector::from_iterator(v.len(), v.iter().map(|&x| c(x, 0.0))))
}

fn criterion_1() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (mut inv, mut inverse, mut adj) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..100 {
        let a = random_matrix(&mut rng, 4, 4);
        let r = identity_residuals(&a, &random_vector(&mut rng, 6), &random_vector(&mut rng, 6)).unwrap();
        inv = inv.max(r.invariance);
        inverse = inverse.max(r.inverse);
        adj = adj.max(r.adjoint);
    }
    let pass = inv <= 1e-9 && inverse <= 1e-9 && adj <= 1e-9;
    outcome(pass, format!("invariance {inv:.2e}, inverse {inverse:.2e}, adjoint {adj:.2e} (limit 1e-9)"))
}

fn rank_oracle(l1: &NPlane, l2: &NPlane) -> f64 {
    let mut joint = CMatrix::zeros(4, 4);
    joint.view_mut((0, 0), (4, 2)).copy_from(l1.basis());
    joint.view_mut((0, 2), (4, 2)).copy_from(l2.basis());
    let sv = linalg::singular_values(&joint);
    sv[3] / sv[0]
}

fn criterion_2() -> Outcome {
    let tol = Tolerances::default();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (mut banded, mut hard, mut meeting) = (0, 0, 0);
    for i in 0..1000 {
        let b1 = random_matrix(&mut rng, 4, 2);
        let mut b2 = random_matrix(&mut rng, 4, 2);
        if i % 2 == 0 {
            b2.set_column(0, &(b1.column(0) * random_complex(&mut rng)));
        }
        let l1 = NPlane::from_basis(&b1, &tol).unwrap();
        let l2 = NPlane::from_basis(&b2, &tol).unwrap();
        let q = planes_intersect(&l1, &l2, &tol).unwrap();
        let oracle = rank_oracle(&l1, &l2) <= tol.rank;
        meeting += usize::from(oracle);
        if q != oracle {
            // declared band: |Q| within an order of magnitude of the rank cutoff
            if intersection_value(&l1, &l2).unwrap() <= 10.0 * tol.rank {
                banded += 1;
            } else {
                hard += 1;
            }
        }
    }
    outcome(hard == 0, format!("1000 pairs ({meeting} meeting): {hard} hard disagreements, {banded} in the tolerance band"))
}

fn criterion_3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (mut equi, mut size6) = (0.0f64, 0.0f64);
    for _ in 0..100 {
        let g = random_mobius(&mut rng);
        let s = P1Point::Finite(random_complex(&mut rng));
        let m = twisted_cubic_matrix(&g);
        let lhs = twisted_cubic_point(g.apply(s));
        equi = equi.max(linalg::chordal_distance(&lhs, &(&m * twisted_cubic_point(s))));
        let hat = compound(&m).unwrap().entries;
        size6 = size6.max((&hat - printed_size6(&g)).camax() / hat.camax());
    }
    let pass = equi <= 1e-10 && size6 <= 1e-9;
    outcome(pass, format!("equivariance {equi:.2e} (limit 1e-10), printed 6×6 entries {size6:.2e} relative (limit 1e-9)"))
}

fn criterion_4() -> Outcome {
    let tol = Tolerances::default();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let exps: Vec<i64> = (1..=200).collect();
    let (mut tw, mut seg, mut failures) = (0.0f64, 0.0f64, Vec::new());
    let mut sampled = 0;
    while sampled < 20 {
        let g = random_mobius(&mut rng);
        let k = larger_eigenvalue_modulus(&g);
        if !(1.5..=10.0).contains(&k) {
            continue;
        }
        sampled += 1;
        let attracting = mobius_fixed_points(&g).unwrap().attracting;
        let t = twisted_cubic_rep(&g, &tol)
            .and_then(|rep| limit_nplane_of_powers(&rep, &exps, &tol))
            .and_then(|l| Ok(plane_distance(&l.plane, &tangent_line_at(attracting))?.value()));
        let s = segre_rep(&g, 1, &tol)
            .and_then(|rep| limit_nplane_of_powers(&rep, &exps, &tol))
            .and_then(|l| Ok(plane_distance(&l.plane, &segre_limit_line(attracting, 1))?.value()));
        match (t, s) {
            (Ok(t), Ok(s)) => {
                tw = tw.max(t);
                seg = seg.max(s);
            }
            (t, s) => failures.push(format!("{:?} {:?}", t.err(), s.err())),
        }
    }
    let pass = failures.is_empty() && tw <= 1e-6 && seg <= 1e-6;
    outcome(
        pass,
        format!("20 loxodromic g, ν ≤ 200: tangent line {tw:.2e}, Segre line {seg:.2e} (limit 1e-6), {} errors {failures:?}", failures.len()),
    )
}

fn criterion_5() -> Outcome {
    let tol = Tolerances::default();
    let one = c(1.0, 0.0);
    let mut worst = 0.0f64;
    let mut notes = Vec::new();
    let mut pass = true;
    for q in [0.0, 1.0] {
        let e = cone_example(c(2.0, 0.0), one, c(q, 0.0), one, &tol).unwrap();
        let g = cone_generator(e.alpha, e.p, e.q, e.r).unwrap();
        let g_inv = linalg::inverse(&g).unwrap();
        for k in -10i64..=10 {
            let base = if k < 0 { &g_inv } else { &g };
            let mut power = linalg::identity(4);
            for _ in 0..k.unsigned_abs() {
                power = base * power;
            }
            let direct = compound(&power).unwrap().entries;
            worst = worst.max((&direct - e.predicted_compound(k)).camax() / direct.camax());
        }
        let map = &e.spec.generators[0].map;
        let exps = ConeExample::limit_exponents();
        let neg: Vec<i64> = exps.iter().map(|k| -k).collect();
        let (plus, minus) = (limit_nplane_of_powers(map, &exps, &tol), limit_nplane_of_powers(map, &neg, &tol));
        match e.predicted_limit_lines() {
            Some((want_plus, want_minus)) => {
                let d = match (plus, minus) {
                    (Ok(p), Ok(m)) => plane_distance(&p.plane, &want_plus).unwrap().value().max(plane_distance(&m.plane, &want_minus).unwrap().value()),
                    _ => f64::INFINITY,
                };
                pass &= q != 0.0 && d <= 1e-6;
                notes.push(format!("q = {q}: limit lines e0∧e3, e2∧e3 within {d:.2e}"));
            }
            None => {
                let rank = match plus {
                    Err(Error::NotALimitPlane { rank }) => rank,
                    _ => 0,
                };
                pass &= q == 0.0 && rank > 1;
                notes.push(format!("q = {q}: rank {rank} limit reported"));
            }
        }
    }
    pass &= worst <= 1e-8;
    outcome(pass, format!("closed form |n| ≤ 10 worst {worst:.2e} relative (limit 1e-8); {}", notes.join("; ")))
}

fn criterion_6() -> Outcome {
    let tol = Tolerances::default();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut cocycle = 0.0f64;
    for _ in 0..1000 {
        let g = ProjectiveMap::from_matrix(&random_matrix(&mut rng, 4, 4), &tol).unwrap();
        let h = ProjectiveMap::from_matrix(&random_matrix(&mut rng, 4, 4), &tol).unwrap();
        let z = random_vector(&mut rng, 4);
        let lhs = mu(&g.compose(&h), &z, &tol).unwrap();
        let rhs = mu(&g, &h.apply(&z), &tol).unwrap() * mu(&h, &z, &tol).unwrap();
        cocycle = cocycle.max((lhs - rhs).abs() / lhs.abs().max(rhs.abs()));
    }
    let mut volume = 0.0f64;
    let mut errors = 0;
    for _ in 0..50 {
        let g = ProjectiveMap::from_matrix(&random_matrix(&mut rng, 4, 4), &tol).unwrap();
        let at = VolumeChart { zeta: random_vector(&mut rng, 2), x: random_vector(&mut rng, 1) };
        match volume_pullback_check(&g, &at, 1e-5) {
            Ok(r) => volume = volume.max(r.rel_err),
            Err(_) => errors += 1,
        }
    }
    let pass = cocycle <= 1e-9 && volume <= 1e-4 && errors == 0;
    outcome(pass, format!("μ cocycle {cocycle:.2e} (limit 1e-9), volume pullback {volume:.2e} (limit 1e-4), {errors} chart escapes"))
}

fn exclusion_and_tube(spec: &GroupSpec) -> Result<(usize, usize, usize), String> {
    let tol = Tolerances::default();
    let depth = 4;
    let region = FordRegion::new(spec, depth, false, &tol).map_err(|e| e.to_string())?;
    let dim = 2 * spec.n + 2;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut interior = Vec::new();
    for _ in 0..50_000 {
        let z = random_vector(&mut rng, dim);
        if region.classify(&z).status == FordStatus::Interior {
            interior.push(z);
            if interior.len() == 100 {
                break;
            }
        }
    }
    let words = region.framed_spec().enumerate(depth).map_err(|e| e.to_string())?;
    let mut stays = 0;
    for z in &interior {
        for e in words.non_identity() {
            stays += usize::from(region.classify(&e.map.apply(z)).status == FordStatus::Interior);
        }
    }
    let est = v_r_estimate(spec, depth, &tol).map_err(|e| e.to_string())?;
    let k = spec.n + 1;
    let mut exterior = 0;
    for _ in 0..200 {
        let lower = random_vector(&mut rng, k);
        let dir = random_vector(&mut rng, k);
        let radius = est.r * (1.0 + 1e-6 + 3.0 * rng.random::<f64>()) * lower.norm();
        let mut z = CVector::zeros(2 * k);
        z.rows_mut(0, k).copy_from(&dir.unscale(dir.norm()).scale(radius));
        z.rows_mut(k, k).copy_from(&lower);
        exterior += usize::from(region.classify(&z).status == FordStatus::Exterior);
    }
    Ok((interior.len(), stays, exterior))
}

fn criterion_7() -> Outcome {
    let tol = Tolerances::default();
    let mut pass = true;
    let mut notes = Vec::new();
    for preset in ["schottky", "klein"] {
        let spec = parse_preset(preset, &tol).unwrap().spec;
        match exclusion_and_tube(&spec) {
            Ok((found, stays, exterior)) => {
                pass &= found == 100 && stays == 0 && exterior == 0;
                notes.push(format!("{preset}: {found} interior points, {stays} stay interior, {exterior} tube points exterior"));
            }
            Err(e) => {
                pass = false;
                notes.push(format!("{preset}: {e}"));
            }
        }
    }
    outcome(pass, notes.join("; "))
}

fn criterion_8() -> Outcome {
    let tol = Tolerances::default();
    let group = default_classical_schottky(3.0).unwrap();
    let spec = represent(&group, Representation::TwistedCubic, &tol).unwrap();
    let rep = club_spade_diagnostics(&spec, 8, &[4.0], false, &tol).unwrap();
    let maxima: Vec<f64> = rep.shells.iter().map(|s| s.max).collect();
    let decreasing = maxima[2..].windows(2).all(|w| w[1] < w[0]);
    let inc = &rep.series[0].increments;
    let ratios: Vec<f64> = inc.windows(2).map(|w| w[0] / w[1]).collect();
    let min_ratio = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let pass = rep.shells.len() == 8 && decreasing && min_ratio >= 1.5;
    outcome(
        pass,
        format!(
            "shell maxima from shell 3 {:?} decreasing: {decreasing}; δ = 4 smallest increment ratio {min_ratio:.1} (limit 1.5)",
            maxima[2..].iter().map(|m| format!("{m:.2e}")).collect::<Vec<_>>()
        ),
    )
}

fn criterion_9() -> Outcome {
    let tol = Tolerances::default();
    let f1 = schottky_group(&diag(&[0.5, 0.5]), &diag(&[2.0, 2.0]), &tol).unwrap();
    let f2 = schottky_group(&diag(&[1.0 / 3.0, 0.25]), &diag(&[3.0, 4.0]), &tol).unwrap();
    let comb = match klein_combine(&f1, &f2, 0.1, 6, &KrOptions::default(), &tol) {
        Ok(c) => c,
        Err(e) => return outcome(false, format!("combination failed: {e}")),
    };
    let rows = syllable_bound_check(&comb, 5, &tol).unwrap();
    let broken = rows.iter().filter(|r| !r.holds(1e-6)).count();
    let slack = rows.iter().map(|r| r.c_inv_norm / r.bound).fold(0.0f64, f64::max);
    outcome(
        broken == 0 && !rows.is_empty(),
        format!(
            "K_r = {:.4}, {} words of length ≤ 5: {broken} violations, largest ‖C⁻¹‖/bound {slack:.3}",
            comb.config.k_r,
            rows.len()
        ),
    )
}

fn kleinian(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_kleinian")).args(args).output().expect("binary runs")
}

fn criterion_10() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let fixtures = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures");
    let mut identical = true;
    for format in ["csv", "ply"] {
        let mut files = Vec::new();
        for run in 0..2 {
            let path = dir.path().join(format!("cloud{run}.{format}"));
            let out = kleinian(&[
                "limit-cloud", "--preset", "twisted-cubic", "--max-length", "7", "--samples", "8", "--seed", "42",
                "--format", format, "--out", path.to_str().unwrap(),
            ]);
            identical &= out.status.code() == Some(0);
            files.push(std::fs::read(&path).unwrap_or_default());
        }
        identical &= !files[0].is_empty() && files[0] == files[1];
    }
    let cases = [
        ("malformed.json", 2),
        ("singular_generator.json", 2),
        ("empty_generators.json", 2),
        ("wrong_size.json", 2),
        ("unknown_preset.json", 2),
    ];
    let mut wrong = Vec::new();
    for (name, want) in cases {
        let got = kleinian(&["limit-cloud", "--config", fixtures.join(name).to_str().unwrap(), "--max-length", "4"]).status.code();
        if got != Some(want) {
            wrong.push(format!("{name}: {got:?}"));
        }
    }
    let budget = kleinian(&["limit-cloud", "--config", fixtures.join("over_budget.json").to_str().unwrap(), "--max-length", "8"]).status.code();
    if budget != Some(4) {
        wrong.push(format!("over_budget.json: {budget:?}"));
    }
    let io = kleinian(&["limit-cloud", "--preset", "schottky", "--max-length", "3", "--out", "/nonexistent/dir/c.csv"]).status.code();
    if io != Some(3) {
        wrong.push(format!("unwritable output: {io:?}"));
    }
    outcome(
        identical && wrong.is_empty(),
        format!("repeat runs byte-identical (csv, ply): {identical}; exit codes wrong: {wrong:?}"),
    )
}

fn main() {
    let criteria: [Criterion; 10] = [
        (1, "compound identity suite", Duration::from_secs(2), criterion_1),
        (2, "intersection oracle equivalence", Duration::from_secs(2), criterion_2),
        (3, "twisted cubic equivariance and compound", Duration::from_secs(2), criterion_3),
        (4, "limit planes of cyclic groups", Duration::from_secs(5), criterion_4),
        (5, "cone example", Duration::from_secs(2), criterion_5),
        (6, "mu cocycle and volume pullback", Duration::from_secs(10), criterion_6),
        (7, "Ford exclusion and tube inclusion", Duration::from_secs(30), criterion_7),
        (8, "shell diagnostics", Duration::from_secs(60), criterion_8),
        (9, "Klein combination bound", Duration::from_secs(60), criterion_9),
        (10, "CLI determinism and exit codes", Duration::from_secs(10), criterion_10),
    ];
    let mut failed = Vec::new();
    for (id, name, budget, run) in criteria {
        let start = Instant::now();
        let o = run();
        let elapsed = start.elapsed();
        let pass = o.pass && elapsed <= budget;
        println!(
            "{} criterion {id} ({name}): {} [{:.2} s of {} s]",
            if pass { "PASS" } else { "FAIL" },
            o.detail,
            elapsed.as_secs_f64(),
            budget.as_secs()
        );
        if !pass {
            failed.push(id);
        }
    }
    if !failed.is_empty() {
        println!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
