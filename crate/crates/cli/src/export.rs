//! Cloud files: CSV, ASCII PLY and the chart projection shared by both.

use std::path::Path;

use kleinian_core::limit::CloudPoint;
use kleinian_core::linalg::CVector;
use serde::Deserialize;

use crate::error::{CliError, CliResult};

/// Points whose last coordinate is this small (relative to the largest,
/// which is 1 after normalization) are outside the chart z_{2n+1} = 1.
pub const CHART_CUTOFF: f64 = 1e-12;

/// Real 3×(4n+4) matrix applied to (Re u₀, Im u₀, Re u₁, ...) where
/// u = z / z_{2n+1}.
#[derive(Debug, Clone, PartialEq)]
pub struct Projection {
    rows: Vec<Vec<f64>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ProjectionFile {
    rows: Vec<Vec<f64>>,
}

impl Projection {
    /// (Re u₀, Re u₁, Re u₂).
    pub fn standard(n: usize) -> Self {
        let width = 4 * n + 4;
        let rows = (0..3)
            .map(|r| (0..width).map(|k| if k == 2 * r { 1.0 } else { 0.0 }).collect())
            .collect();
        Self { rows }
    }

    pub fn new(rows: Vec<Vec<f64>>, n: usize) -> CliResult<Self> {
        let width = 4 * n + 4;
        if rows.len() != 3 || rows.iter().any(|r| r.len() != width) {
            return Err(CliError::Input(format!("projection must be a 3×{width} real matrix")));
        }
        if rows.iter().flatten().any(|x| !x.is_finite()) {
            return Err(CliError::Input("projection entries must be finite".into()));
        }
        Ok(Self { rows })
    }

    /// Reads `{"rows": [[...], [...], [...]]}`.
    pub fn load(path: &Path, n: usize) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let file: ProjectionFile = serde_json::from_str(&text).map_err(|e| {
            CliError::Input(format!("{}:{}:{}: {e}", path.display(), e.line(), e.column()))
        })?;
        Self::new(file.rows, n)
    }

    /// `None` outside the affine chart.
    pub fn apply(&self, z: &CVector) -> Option<[f64; 3]> {
        let last = z[z.len() - 1];
        let scale = z.iter().fold(0.0f64, |m, w| m.max(w.norm()));
        if last.norm() <= CHART_CUTOFF * scale {
            return None;
        }
        let real: Vec<f64> = z.iter().flat_map(|w| {
            let u = w / last;
            [u.re, u.im]
        }).collect();
        let mut out = [0.0; 3];
        for (o, row) in out.iter_mut().zip(&self.rows) {
            *o = row.iter().zip(&real).map(|(a, b)| a * b).sum();
        }
        Some(out)
    }
}

fn num(x: f64) -> String {
    if x.is_nan() {
        "NaN".to_string()
    } else {
        // 17 significant digits round-trip every f64.
        format!("{x:.16e}")
    }
}

fn csv_error(e: csv::Error) -> CliError {
    CliError::Input(format!("csv: {e}"))
}

/// Cloud as CSV: word_length, homogeneous coordinates, projection (NaN
/// outside the chart).
pub fn cloud_csv(points: &[CloudPoint], dim: usize, projection: &Projection) -> CliResult<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["word_length".to_string()];
    for k in 0..dim {
        header.push(format!("z{k}_re"));
        header.push(format!("z{k}_im"));
    }
    header.extend(["x", "y", "z"].map(String::from));
    w.write_record(&header).map_err(csv_error)?;
    for p in points {
        let mut rec = vec![p.word_length.to_string()];
        for z in p.point.iter() {
            rec.push(num(z.re));
            rec.push(num(z.im));
        }
        let xyz = projection.apply(&p.point).unwrap_or([f64::NAN; 3]);
        rec.extend(xyz.iter().map(|&x| num(x)));
        w.write_record(&rec).map_err(csv_error)?;
    }
    w.into_inner().map_err(|e| CliError::Input(format!("csv: {e}")))
}

/// ASCII PLY of the projected points inside the chart.
pub fn cloud_ply(points: &[CloudPoint], projection: &Projection) -> Vec<u8> {
    let xyz: Vec<[f64; 3]> = points.iter().filter_map(|p| projection.apply(&p.point)).collect();
    let mut out = String::new();
    out.push_str("ply\nformat ascii 1.0\n");
    out.push_str(&format!("element vertex {}\n", xyz.len()));
    out.push_str("property float x\nproperty float y\nproperty float z\nend_header\n");
    for [x, y, z] in xyz {
        out.push_str(&format!("{} {} {}\n", x as f32, y as f32, z as f32));
    }
    out.into_bytes()
}

/// One projected row of a cloud file.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlotPoint {
    pub word_length: usize,
    pub x: f64,
    pub y: f64,
}

/// Reads the word_length, x and y columns of a cloud CSV. Rows outside the
/// chart (NaN projection) are dropped.
pub fn read_cloud(path: &Path) -> CliResult<Vec<PlotPoint>> {
    let bytes = std::fs::read(path).map_err(|e| CliError::io(path, e))?;
    let origin = path.display().to_string();
    let mut r = csv::Reader::from_reader(bytes.as_slice());
    let header = r
        .headers()
        .map_err(|e| CliError::Input(format!("{origin}: {e}")))?
        .clone();
    let col = |name: &str| {
        header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| CliError::Input(format!("{origin}: missing column `{name}`")))
    };
    let (cl, cx, cy) = (col("word_length")?, col("x")?, col("y")?);
    let mut out = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| CliError::Input(format!("{origin}: {e}")))?;
        let line = rec.position().map_or(0, |p| p.line());
        let field = |k: usize| rec.get(k).unwrap_or("");
        let word_length: usize = field(cl)
            .parse()
            .map_err(|_| CliError::Input(format!("{origin}:{line}: bad word_length `{}`", field(cl))))?;
        let parse = |k: usize| {
            field(k)
                .parse::<f64>()
                .map_err(|_| CliError::Input(format!("{origin}:{line}: bad number `{}`", field(k))))
        };
        let (x, y) = (parse(cx)?, parse(cy)?);
        if x.is_finite() && y.is_finite() {
            out.push(PlotPoint { word_length, x, y });
        }
    }
    Ok(out)
}
