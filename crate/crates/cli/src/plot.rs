//! Static SVG scatter of a projected cloud.

use std::collections::BTreeMap;
use std::fmt::Write;

use crate::export::PlotPoint;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 520.0;
const MARGIN: f64 = 40.0;
const LEGEND: f64 = 120.0;

const PALETTE: [&str; 10] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
];

pub fn color_for(index: usize) -> &'static str {
    PALETTE[index % PALETTE.len()]
}

/// Scatter of (x, y), one colour per word length, with a legend. An empty
/// input still produces axes and a legend entry saying so.
pub fn scatter_svg(points: &[PlotPoint], title: &str) -> String {
    let lengths: BTreeMap<usize, usize> = {
        let mut m = BTreeMap::new();
        for p in points {
            *m.entry(p.word_length).or_insert(0) += 1;
        }
        m
    };
    let color_of: BTreeMap<usize, &str> = lengths.keys().enumerate().map(|(i, &l)| (l, color_for(i))).collect();

    let (mut x0, mut x1, mut y0, mut y1) = points.iter().fold(
        (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY),
        |(a, b, c, d), p| (a.min(p.x), b.max(p.x), c.min(p.y), d.max(p.y)),
    );
    if points.is_empty() {
        (x0, x1, y0, y1) = (-1.0, 1.0, -1.0, 1.0);
    }
    if x1 - x0 < 1e-12 {
        (x0, x1) = (x0 - 0.5, x1 + 0.5);
    }
    if y1 - y0 < 1e-12 {
        (y0, y1) = (y0 - 0.5, y1 + 0.5);
    }
    let plot_w = WIDTH - 2.0 * MARGIN - LEGEND;
    let plot_h = HEIGHT - 2.0 * MARGIN;
    let sx = |x: f64| MARGIN + (x - x0) / (x1 - x0) * plot_w;
    let sy = |y: f64| HEIGHT - MARGIN - (y - y0) / (y1 - y0) * plot_h;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(s, r#"<title>{}</title>"#, escape(title));
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<rect x="{MARGIN}" y="{MARGIN}" width="{plot_w}" height="{plot_h}" fill="none" stroke="black" stroke-width="1"/>"#
    );
    for (label, x, y, anchor) in [
        (format!("{x0:.4}"), MARGIN, HEIGHT - MARGIN + 16.0, "start"),
        (format!("{x1:.4}"), MARGIN + plot_w, HEIGHT - MARGIN + 16.0, "end"),
        (format!("{y0:.4}"), MARGIN - 4.0, HEIGHT - MARGIN, "end"),
        (format!("{y1:.4}"), MARGIN - 4.0, MARGIN + 10.0, "end"),
    ] {
        let _ = writeln!(
            s,
            r#"<text x="{x:.2}" y="{y:.2}" font-family="sans-serif" font-size="10" text-anchor="{anchor}">{label}</text>"#
        );
    }
    let _ = writeln!(s, r#"<g stroke="none">"#);
    for p in points {
        let _ = writeln!(
            s,
            r#"<circle cx="{:.3}" cy="{:.3}" r="1.5" fill="{}"/>"#,
            sx(p.x),
            sy(p.y),
            color_of[&p.word_length]
        );
    }
    let _ = writeln!(s, "</g>");

    let lx = WIDTH - LEGEND - MARGIN / 2.0 + 10.0;
    let _ = writeln!(s, r#"<g font-family="sans-serif" font-size="11">"#);
    let _ = writeln!(s, r#"<text x="{lx}" y="{}">word length</text>"#, MARGIN + 10.0);
    if lengths.is_empty() {
        let _ = writeln!(s, r#"<text x="{lx}" y="{}" fill="gray">no points</text>"#, MARGIN + 28.0);
    }
    for (i, (len, count)) in lengths.iter().enumerate() {
        let y = MARGIN + 28.0 + 16.0 * i as f64;
        let _ = writeln!(
            s,
            r#"<rect x="{lx}" y="{:.1}" width="9" height="9" fill="{}"/><text x="{}" y="{y:.1}">{len} ({count})</text>"#,
            y - 8.0,
            color_of[len],
            lx + 14.0
        );
    }
    let _ = writeln!(s, "</g>");
    s.push_str("</svg>\n");
    s
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
