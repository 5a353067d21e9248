//! Standalone SVG 1.1 scatter plots of recorded snapshots: one circle per
//! point colored by label parity, one cyclic polyline per parity class, and
//! the predicted limiting ellipse overlaid for odd n.

use std::f64::consts::PI;
use std::path::Path;

use super::{export, RunRecord};
use crate::asymptotics::{DominantCoefficients, Parity};
use crate::error::{Error, Result};

const SIZE: f64 = 640.0;
const POINT_RADIUS: f64 = 4.0;
// matching the original plotting convention: even labels red, odd green
const EVEN_COLOR: &str = "#d62728";
const ODD_COLOR: &str = "#2ca02c";
const ELLIPSE_COLOR: &str = "#555555";

pub(super) fn write_svg(record: &RunRecord, t: u64, path: &Path) -> Result<()> {
    let snapshot = record.snapshot_at(t).ok_or(Error::NoSuchSnapshot(t))?;
    let d = record.config.d;
    if d < 2 {
        return Err(Error::NotTwoDimensional(d));
    }
    let n = record.config.n;

    // plotted coordinates: axes 0 and 1 (a projection when d = 3)
    let points: Vec<(f64, f64)> = (0..n)
        .map(|l| (snapshot.coords[l * d], snapshot.coords[l * d + 1]))
        .collect();

    let ellipse = ellipse_points(record, snapshot.logmag, t);

    // bounding square of the plotted cloud with a 5% margin
    let (mut lo_x, mut hi_x, mut lo_y, mut hi_y) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for &(x, y) in points.iter().chain(ellipse.iter().flatten()) {
        lo_x = lo_x.min(x);
        hi_x = hi_x.max(x);
        lo_y = lo_y.min(y);
        hi_y = hi_y.max(y);
    }
    let cx = 0.5 * (lo_x + hi_x);
    let cy = 0.5 * (lo_y + hi_y);
    let mut half = 0.5 * (hi_x - lo_x).max(hi_y - lo_y) * 1.05;
    if half <= 0.0 {
        half = 1.0;
    }
    let map = |x: f64, y: f64| {
        (
            SIZE / 2.0 + (x - cx) / half * (SIZE / 2.0),
            SIZE / 2.0 - (y - cy) / half * (SIZE / 2.0),
        )
    };

    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" \
         width=\"{SIZE}\" height=\"{SIZE}\" viewBox=\"0 0 {SIZE} {SIZE}\">\n"
    ));
    let mut title = format!("n={n} d={d} t={t} seed={}", record.config.seed);
    if d > 2 {
        title.push_str(" (projection onto axes 0,1)");
    }
    out.push_str(&format!("  <title>{title}</title>\n"));
    out.push_str(&format!(
        "  <rect x=\"0\" y=\"0\" width=\"{SIZE}\" height=\"{SIZE}\" fill=\"white\"/>\n"
    ));

    if let Some(curve) = &ellipse {
        let mut path_data = String::new();
        for (i, &(x, y)) in curve.iter().enumerate() {
            let (px, py) = map(x, y);
            path_data.push_str(if i == 0 { "M" } else { " L" });
            path_data.push_str(&format!("{px:.2} {py:.2}"));
        }
        path_data.push_str(" Z");
        out.push_str(&format!(
            "  <path d=\"{path_data}\" fill=\"none\" stroke=\"{ELLIPSE_COLOR}\" \
             stroke-width=\"1\" stroke-dasharray=\"6 4\"/>\n"
        ));
    }

    for (parity, color) in [(0usize, EVEN_COLOR), (1usize, ODD_COLOR)] {
        let labels: Vec<usize> = (parity..n).step_by(2).collect();
        let mut pts = String::new();
        for &l in labels.iter().chain(labels.first()) {
            let (px, py) = map(points[l].0, points[l].1);
            if !pts.is_empty() {
                pts.push(' ');
            }
            pts.push_str(&format!("{px:.2},{py:.2}"));
        }
        out.push_str(&format!(
            "  <polyline points=\"{pts}\" fill=\"none\" stroke=\"{color}\" \
             stroke-width=\"1\" stroke-opacity=\"0.6\"/>\n"
        ));
    }

    for (l, &(x, y)) in points.iter().enumerate() {
        let (px, py) = map(x, y);
        let color = if l % 2 == 0 { EVEN_COLOR } else { ODD_COLOR };
        out.push_str(&format!(
            "  <circle cx=\"{px:.2}\" cy=\"{py:.2}\" r=\"{POINT_RADIUS}\" fill=\"{color}\"/>\n"
        ));
    }
    out.push_str("</svg>\n");
    export::write_file(path, out.as_bytes())
}

/// Samples the predicted limiting ellipse on the normalized scale of the
/// snapshot: `exp(t ln r - logmag) * (A cos s + B sin s, C cos s + D sin s)`.
fn ellipse_points(record: &RunRecord, logmag: f64, t: u64) -> Option<Vec<(f64, f64)>> {
    let model = &record.model;
    if model.parity != Parity::Odd || record.config.d != 2 || model.degenerate {
        return None;
    }
    let DominantCoefficients::Oscillatory { pairs } = &model.dominant else {
        return None;
    };
    let scale = (t as f64 * model.rate.ln() - logmag).exp();
    if !scale.is_finite() {
        return None;
    }
    let [a, b] = pairs[0];
    let [c, d] = pairs[1];
    let samples = 180;
    Some(
        (0..samples)
            .map(|i| {
                let s = 2.0 * PI * i as f64 / samples as f64;
                (
                    scale * (a * s.cos() + b * s.sin()),
                    scale * (c * s.cos() + d * s.sin()),
                )
            })
            .collect(),
    )
}
