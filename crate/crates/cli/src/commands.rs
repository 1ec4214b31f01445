use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use kleinian_core::constructions::mobius::P1Point;
use kleinian_core::constructions::reps::{
    printed_size6, segre_limit_line, segre_matrix, twisted_cubic_matrix, twisted_cubic_point, Representation,
};
use kleinian_core::exterior::{compound, identity_residuals, ExteriorBasis};
use kleinian_core::ford::{club_spade_diagnostics, v_r_estimate, FordRegion};
use kleinian_core::group::{GroupSpec, Word};
use kleinian_core::limit::{limit_set_cloud, CloudOptions};
use kleinian_core::linalg::{self, c, CVector};
use kleinian_core::planes::plane_distance;
use kleinian_core::Tolerances;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::config::{resolve_group, LoadedGroup};
use crate::error::{CliError, CliResult};
use crate::export::{cloud_csv, cloud_ply, read_cloud, Projection};
use crate::plot::scatter_svg;
use crate::preset::parse_complex;

#[derive(Debug, Parser)]
#[command(name = "kleinian", version, about = "Limit sets, Ford regions and diagnostics for groups acting on CP^(2n+1)")]
pub struct Cli {
    /// Worker threads for enumeration and sampling (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Tolerance overrides, e.g. `rank=1e-9,boundary=1e-6`.
    #[arg(long, global = true, value_name = "KEY=VALUE,...")]
    pub tol_overrides: Option<String>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the compound identities and the representation of the group.
    Verify(VerifyArgs),
    /// Sample points on images of a seed plane under long words.
    LimitCloud(CloudArgs),
    /// Classify points against the truncated Ford region.
    Ford(FordArgs),
    /// Shell statistics of the C blocks and the tube radius estimate.
    Diagnostics(DiagArgs),
    /// Scatter plot of a cloud CSV.
    Plot(PlotArgs),
}

#[derive(Debug, Args)]
pub struct GroupArgs {
    /// JSON group configuration.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Preset group instead of a config file, e.g. `twisted-cubic:schottky(3)`.
    #[arg(long)]
    pub preset: Option<String>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub group: GroupArgs,
    #[arg(long, default_value_t = 100)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CloudFormat {
    Csv,
    Ply,
}

#[derive(Debug, Args)]
pub struct CloudArgs {
    #[command(flatten)]
    pub group: GroupArgs,
    #[arg(long, default_value_t = 8)]
    pub max_length: usize,
    /// Points sampled on each plane.
    #[arg(long, default_value_t = 16)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output file (stdout if omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = CloudFormat::Csv)]
    pub format: CloudFormat,
    /// JSON `{"rows": [...]}` with a real 3×(4n+4) projection matrix.
    #[arg(long)]
    pub projection: Option<PathBuf>,
    #[arg(long)]
    pub allow_partial: bool,
}

#[derive(Debug, Args)]
pub struct FordArgs {
    #[command(flatten)]
    pub group: GroupArgs,
    /// Point in frame coordinates as 2n+2 comma-separated complex numbers.
    #[arg(long = "point", allow_hyphen_values = true)]
    pub points: Vec<String>,
    /// Grid `x0,x1,y0,y1,nx,ny` over Re/Im of one chart coordinate.
    #[arg(long, allow_hyphen_values = true)]
    pub grid: Option<String>,
    /// Chart coordinate varied by --grid.
    #[arg(long, default_value_t = 0)]
    pub grid_coord: usize,
    /// Base point for --grid (defaults to the chart origin).
    #[arg(long, allow_hyphen_values = true)]
    pub base: Option<String>,
    #[arg(long, default_value_t = 4)]
    pub max_length: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub allow_partial: bool,
}

#[derive(Debug, Args)]
pub struct DiagArgs {
    #[command(flatten)]
    pub group: GroupArgs,
    #[arg(long, default_value_t = 6)]
    pub max_length: usize,
    /// Exponents of the series Σ‖C⁻¹‖^δ.
    #[arg(long, value_delimiter = ',', default_value = "4")]
    pub delta: Vec<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub allow_partial: bool,
}

#[derive(Debug, Args)]
pub struct PlotArgs {
    /// Cloud CSV written by limit-cloud.
    pub cloud: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

pub fn run(cli: &Cli, stdout: &mut dyn Write) -> CliResult<()> {
    let mut tol = Tolerances::default();
    if let Some(spec) = &cli.tol_overrides {
        tol = tol.with_overrides(spec)?;
    }
    match &cli.command {
        Command::Verify(a) => cmd_verify(a, &tol, stdout),
        Command::LimitCloud(a) => cmd_limit_cloud(a, &tol, stdout),
        Command::Ford(a) => cmd_ford(a, &tol, stdout),
        Command::Diagnostics(a) => cmd_diagnostics(a, &tol, stdout),
        Command::Plot(a) => cmd_plot(a),
    }
}

fn load(g: &GroupArgs, tol: &Tolerances) -> CliResult<LoadedGroup> {
    resolve_group(g.config.as_deref(), g.preset.as_deref(), tol)
}

fn emit(out: Option<&Path>, bytes: &[u8], stdout: &mut dyn Write) -> CliResult<()> {
    match out {
        Some(path) => std::fs::write(path, bytes).map_err(|e| CliError::io(path, e)),
        None => stdout.write_all(bytes).map_err(|e| CliError::io("<stdout>", e)),
    }
}

fn report(stdout: &mut dyn Write, line: String) -> CliResult<()> {
    writeln!(stdout, "{line}").map_err(|e| CliError::io("<stdout>", e))
}

fn verdict(worst: f64, limit: f64) -> &'static str {
    if worst <= limit {
        "ok"
    } else {
        "FAIL"
    }
}

/// Reduced words of length ≤ `len`, shortlex order.
fn all_words(spec: &GroupSpec, len: usize) -> CliResult<Vec<Word>> {
    let mut s = spec.clone();
    s.frame = None;
    Ok(s.enumerate(len)?.elements.into_iter().map(|e| e.map.word().clone()).collect())
}

pub fn cmd_verify(a: &VerifyArgs, tol: &Tolerances, stdout: &mut dyn Write) -> CliResult<()> {
    let g = load(&a.group, tol)?;
    let spec = &g.spec;
    let limit = tol.identity;
    let m = spec.n + 1;
    let len = ExteriorBasis::get(m)?.len();
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let mut failures = Vec::new();
    report(stdout, format!("group: {} (n = {}, {} generators)", g.label, spec.n, spec.generators.len()))?;

    let mut worst = 0.0f64;
    for _ in 0..a.samples {
        let am = loop {
            let am = linalg::random_matrix(&mut rng, 2 * m, 2 * m);
            if linalg::det(&am).norm() > 1e-6 {
                break am;
            }
        };
        let z = linalg::random_vector(&mut rng, len);
        let w = linalg::random_vector(&mut rng, len);
        worst = worst.max(identity_residuals(&am, &z, &w)?.worst());
    }
    let v = verdict(worst, limit);
    report(stdout, format!("compound identities, {} random A in GL({}): worst {worst:.3e} (limit {limit:e}) {v}", a.samples, 2 * m))?;
    if v != "ok" {
        failures.push("compound identities");
    }

    // Rounding in Q(Âz, Âw) and Â*Â scales with ‖Â‖², so for unimodular
    // generators those two residuals are taken relative to ‖Â‖².
    let mut worst = 0.0f64;
    for gen in &spec.generators {
        let sl = gen.map.sl_matrix();
        let z = linalg::random_vector(&mut rng, len);
        let w = linalg::random_vector(&mut rng, len);
        let r = identity_residuals(&sl, &z, &w)?;
        let scale = linalg::op_norm(&compound(&sl)?.entries).powi(2).max(1.0);
        worst = worst.max(r.invariance.max(r.inverse) / scale).max(r.adjoint);
    }
    let v = verdict(worst, limit);
    report(stdout, format!("compound identities on generators (relative to ‖Â‖²): worst {worst:.3e} {v}"))?;
    if v != "ok" {
        failures.push("generator identities");
    }

    // Products of short words against direct evaluation, skipping pairs that
    // cancel at the junction (cancellation is ill-conditioned).
    let words = all_words(spec, 2)?;
    let mut worst = 0.0f64;
    let mut pairs = 0;
    for u in &words {
        for w in &words {
            let uw = u.concat(w);
            if uw.len() != u.len() + w.len() {
                continue;
            }
            let product = spec.evaluate(u).compose(&spec.evaluate(w));
            worst = worst.max(linalg::phase_aligned_max_diff(product.rep(), spec.evaluate(&uw).rep()));
            pairs += 1;
        }
    }
    let v = verdict(worst, limit);
    report(stdout, format!("word homomorphism, {pairs} pairs: worst {worst:.3e} {v}"))?;
    if v != "ok" {
        failures.push("word homomorphism");
    }

    if let Some((group, rep)) = &g.mobius {
        let words = all_words(spec, 3)?;
        let mut worst_rep = 0.0f64;
        let mut worst_eq = 0.0f64;
        let mut worst_size6 = 0.0f64;
        for w in &words {
            let mob = group.evaluate(w);
            let matrix = match rep {
                Representation::TwistedCubic => twisted_cubic_matrix(&mob),
                Representation::Segre => segre_matrix(&mob, 1),
            };
            let direct = linalg::normalize_matrix(&matrix).map(|(m, _)| m).ok_or_else(|| {
                CliError::Input(format!("representation of {} vanishes", w.render(&spec.names())))
            })?;
            worst_rep = worst_rep.max(linalg::phase_aligned_max_diff(&direct, spec.evaluate(w).rep()));
            for k in 0..4 {
                let s = c(0.3 * k as f64 - 0.5, 0.7 - 0.2 * k as f64);
                let d = match rep {
                    Representation::TwistedCubic => {
                        let lhs = twisted_cubic_point(mob.apply(P1Point::Finite(s)));
                        linalg::chordal_distance(&lhs, &(&matrix * twisted_cubic_point(P1Point::Finite(s))))
                    }
                    Representation::Segre => {
                        let line = segre_limit_line(P1Point::Finite(s), 1);
                        let moved = line.transform(&matrix, tol)?;
                        plane_distance(&moved, &segre_limit_line(mob.apply(P1Point::Finite(s)), 1))?.value()
                    }
                };
                worst_eq = worst_eq.max(d);
            }
            if *rep == Representation::TwistedCubic {
                let hat = compound(&matrix)?.entries;
                let printed = printed_size6(&mob);
                let scale = linalg::max_abs(hat.iter()).max(f64::MIN_POSITIVE);
                worst_size6 = worst_size6.max(linalg::max_abs((hat - printed).iter()) / scale);
            }
        }
        let v = verdict(worst_rep, limit);
        report(stdout, format!("representation of {} Möbius words: worst {worst_rep:.3e} {v}", words.len()))?;
        if v != "ok" {
            failures.push("representation");
        }
        let eq_limit = 1e-10;
        let v = verdict(worst_eq, eq_limit);
        report(stdout, format!("equivariance: worst {worst_eq:.3e} (limit {eq_limit:e}) {v}"))?;
        if v != "ok" {
            failures.push("equivariance");
        }
        if *rep == Representation::TwistedCubic {
            let v = verdict(worst_size6, limit);
            report(stdout, format!("compound vs closed-form 6×6 entries: worst {worst_size6:.3e} {v}"))?;
            if v != "ok" {
                failures.push("closed-form compound");
            }
        }
    }

    if failures.is_empty() {
        report(stdout, "all checks passed".into())
    } else {
        Err(CliError::Breach(format!("residual breach: {}", failures.join(", "))))
    }
}

pub fn cmd_limit_cloud(a: &CloudArgs, tol: &Tolerances, stdout: &mut dyn Write) -> CliResult<()> {
    let g = load(&a.group, tol)?;
    let projection = match &a.projection {
        Some(p) => Projection::load(p, g.spec.n)?,
        None => Projection::standard(g.spec.n),
    };
    let options = CloudOptions { seed_plane: None, allow_partial: a.allow_partial };
    let cloud = limit_set_cloud(&g.spec, a.max_length, a.samples, a.seed, &options, tol)?;
    if cloud.truncated {
        eprintln!("warning: word budget of {} reached; cloud is partial", g.spec.max_words);
    }
    let bytes = match a.format {
        CloudFormat::Csv => cloud_csv(&cloud.points, 2 * g.spec.n + 2, &projection)?,
        CloudFormat::Ply => cloud_ply(&cloud.points, &projection),
    };
    emit(a.out.as_deref(), &bytes, stdout)?;
    eprintln!("{} points on {} planes", cloud.points.len(), cloud.planes.len());
    Ok(())
}

fn parse_point(s: &str, dim: usize) -> CliResult<CVector> {
    let entries: Option<Vec<_>> = s.split(',').map(parse_complex).collect();
    let entries = entries.ok_or_else(|| CliError::Input(format!("malformed point `{s}`")))?;
    if entries.len() != dim {
        return Err(CliError::Input(format!("point `{s}` has {} coordinates, expected {dim}", entries.len())));
    }
    let v = CVector::from_vec(entries);
    if v.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) || v.norm() == 0.0 {
        return Err(CliError::Input(format!("point `{s}` is zero or not finite")));
    }
    Ok(v)
}

fn grid_points(a: &FordArgs, grid: &str, dim: usize) -> CliResult<Vec<CVector>> {
    let bad = || CliError::Input(format!("malformed grid `{grid}` (expected x0,x1,y0,y1,nx,ny)"));
    let parts: Vec<&str> = grid.split(',').map(str::trim).collect();
    let [x0, x1, y0, y1, nx, ny] = parts[..] else {
        return Err(bad());
    };
    let f = |s: &str| s.parse::<f64>().ok().filter(|x| x.is_finite()).ok_or_else(bad);
    let k = |s: &str| s.parse::<usize>().ok().filter(|&k| k > 0).ok_or_else(bad);
    let (x0, x1, y0, y1, nx, ny) = (f(x0)?, f(x1)?, f(y0)?, f(y1)?, k(nx)?, k(ny)?);
    if a.grid_coord + 1 >= dim {
        return Err(CliError::Input(format!("--grid-coord must be below {}", dim - 1)));
    }
    let base = match &a.base {
        Some(b) => parse_point(b, dim)?,
        None => CVector::from_fn(dim, |i, _| if i + 1 == dim { c(1.0, 0.0) } else { c(0.0, 0.0) }),
    };
    let step = |lo: f64, hi: f64, n: usize, i: usize| if n == 1 { lo } else { lo + (hi - lo) * i as f64 / (n - 1) as f64 };
    let mut pts = Vec::with_capacity(nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            let mut z = base.clone();
            z[a.grid_coord] = c(step(x0, x1, nx, i), step(y0, y1, ny, j)) * base[dim - 1];
            pts.push(z);
        }
    }
    Ok(pts)
}

pub fn cmd_ford(a: &FordArgs, tol: &Tolerances, stdout: &mut dyn Write) -> CliResult<()> {
    let g = load(&a.group, tol)?;
    let dim = 2 * g.spec.n + 2;
    let mut points = Vec::new();
    for p in &a.points {
        points.push(parse_point(p, dim)?);
    }
    if let Some(grid) = &a.grid {
        points.extend(grid_points(a, grid, dim)?);
    }
    if points.is_empty() {
        return Err(CliError::Input("give at least one --point or a --grid".into()));
    }
    let region = FordRegion::new(&g.spec, a.max_length, a.allow_partial, tol)?;
    if region.truncated() {
        eprintln!("warning: word budget reached; verdicts use a partial word list");
    }
    let verdicts = region.classify_many(&points);
    let names = g.spec.names();
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header: Vec<String> = ["index", "status", "max_mu", "witness", "depth", "torsion_caveat"]
        .map(String::from)
        .to_vec();
    for k in 0..dim {
        header.push(format!("z{k}_re"));
        header.push(format!("z{k}_im"));
    }
    let csv_err = |e: csv::Error| CliError::Input(format!("csv: {e}"));
    w.write_record(&header).map_err(csv_err)?;
    for (i, v) in verdicts.iter().enumerate() {
        let mut rec = vec![
            i.to_string(),
            v.status.to_string(),
            format!("{:.16e}", v.max_mu),
            v.witness.as_ref().map(|w| w.render(&names)).unwrap_or_default(),
            v.depth.to_string(),
            v.torsion_caveat.to_string(),
        ];
        for z in v.point.iter() {
            rec.push(format!("{:.16e}", z.re));
            rec.push(format!("{:.16e}", z.im));
        }
        w.write_record(&rec).map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Input(format!("csv: {e}")))?;
    emit(a.out.as_deref(), &bytes, stdout)
}

pub fn cmd_diagnostics(a: &DiagArgs, tol: &Tolerances, stdout: &mut dyn Write) -> CliResult<()> {
    let g = load(&a.group, tol)?;
    if a.delta.iter().any(|d| !d.is_finite() || *d <= 0.0) {
        return Err(CliError::Input("--delta values must be positive".into()));
    }
    let rep = club_spade_diagnostics(&g.spec, a.max_length, &a.delta, a.allow_partial, tol)?;

    let csv_err = |e: csv::Error| CliError::Input(format!("csv: {e}"));
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header: Vec<String> =
        ["length", "count", "max_c_inv", "min_c_inv", "singular", "r0_max"].map(String::from).to_vec();
    for s in &rep.series {
        header.push(format!("increment_delta_{}", s.delta));
        header.push(format!("partial_sum_delta_{}", s.delta));
    }
    w.write_record(&header).map_err(csv_err)?;
    for (i, sh) in rep.shells.iter().enumerate() {
        let mut rec = vec![
            sh.length.to_string(),
            sh.count.to_string(),
            format!("{:.16e}", sh.max),
            format!("{:.16e}", sh.min),
            sh.infinite.to_string(),
            format!("{:.16e}", sh.r0_max),
        ];
        for s in &rep.series {
            rec.push(format!("{:.16e}", s.increments[i]));
            rec.push(format!("{:.16e}", s.partial_sums[i]));
        }
        w.write_record(&rec).map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Input(format!("csv: {e}")))?;
    emit(a.out.as_deref(), &bytes, stdout)?;

    eprintln!("group: {} (frame {})", g.label, if rep.frame_used { "applied" } else { "none" });
    eprintln!("words up to length {}{}", a.max_length, if rep.truncated { " (truncated by budget)" } else { "" });
    eprintln!("sup ‖C⁻¹‖ ≈ {:.6e}", rep.rho);
    eprintln!("R₀ = sup max(‖AC⁻¹‖, ‖C⁻¹D‖) ≈ {:.6e}", rep.r0);
    match rep.monotone_from {
        Some(k) => eprintln!("shell maxima strictly decrease from shell {k}"),
        None => eprintln!("shell maxima do not settle into a decrease"),
    }
    for s in &rep.series {
        let ratios: Vec<String> = s
            .increments
            .windows(2)
            .map(|p| if p[1] > 0.0 { format!("{:.3}", p[0] / p[1]) } else { "inf".into() })
            .collect();
        eprintln!("δ = {}: partial sum {:.6e}, increment ratios [{}]", s.delta, s.partial_sums.last().copied().unwrap_or(0.0), ratios.join(", "));
    }
    let flagged: usize = rep.shells.iter().map(|s| s.infinite).sum();
    if flagged > 0 {
        eprintln!(
            "{flagged} words have C blocks conditioned beyond the `singular` cutoff {:e}; they are left out of the shell statistics",
            tol.singular
        );
    }
    if !rep.torsion_generators.is_empty() {
        let names = g.spec.names();
        let t: Vec<&str> = rep.torsion_generators.iter().map(|&k| names[k].as_str()).collect();
        eprintln!("caveat: generators of finite order: {}", t.join(", "));
    }
    if rep.truncated {
        eprintln!("V_R estimate skipped: enumeration was truncated");
    } else {
        match v_r_estimate(&g.spec, a.max_length, tol) {
            Ok(v) => eprintln!(
                "V_R tube radius R = R₀ + ρ ≈ {:.6e} (R₀ {:.6e}, ρ {:.6e}){}",
                v.r,
                v.r0,
                v.rho,
                if v.growing { "; still growing at the last shell" } else { "" }
            ),
            Err(e) => eprintln!("V_R estimate unavailable: {e}"),
        }
    }
    Ok(())
}

pub fn cmd_plot(a: &PlotArgs) -> CliResult<()> {
    let points = read_cloud(&a.cloud)?;
    let title = a.cloud.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let svg = scatter_svg(&points, &title);
    std::fs::write(&a.out, svg).map_err(|e| CliError::io(&a.out, e))
}
