//! Graph emission: CSV rows or an SVG polyline of the planar curve of a
//! Fermat real, with the function values on the abscissa and the parameter
//! on the ordinate (so infinitesimals draw as curves tangent to the real
//! line and standard reals as vertical ticks).

use std::fmt::Write as _;
use std::fs;

use continuum::rational::{Rational, Scalar};
use continuum::FermatReal;

use crate::errors::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotFormat {
    Csv,
    Svg,
}

/// Writes the sampled graph of `x` over `[0, delta)` to `path`.
pub fn emit_plot(
    x: &FermatReal,
    delta: &Rational,
    samples: usize,
    format: PlotFormat,
    path: &str,
) -> CliResult<()> {
    let points = x.graph_points(delta, samples).map_err(CliError::from)?;
    let body = match format {
        PlotFormat::Csv => render_csv(&points),
        PlotFormat::Svg => render_svg(&points),
    };
    fs::write(path, body).map_err(|e| CliError::Io(format!("{path}: {e}")))
}

fn scalar_cell(s: &Scalar) -> String {
    match s {
        Scalar::Exact(r) => r.to_string(),
        Scalar::Approx(v) => format!("{v}"),
    }
}

fn render_csv(points: &[(Scalar, Rational)]) -> String {
    let mut out = String::from("p,t\n");
    for (p, t) in points {
        let _ = writeln!(out, "{},{}", scalar_cell(p), t);
    }
    out
}

fn render_svg(points: &[(Scalar, Rational)]) -> String {
    const W: f64 = 400.0;
    const H: f64 = 400.0;
    const MARGIN: f64 = 20.0;
    let ps: Vec<f64> = points.iter().map(|(p, _)| p.to_f64()).collect();
    let ts: Vec<f64> = points.iter().map(|(_, t)| t.to_f64()).collect();
    let (p_min, p_max) = bounds(&ps);
    let (t_min, t_max) = bounds(&ts);
    let p_span = if p_max > p_min { p_max - p_min } else { 1.0 };
    let t_span = if t_max > t_min { t_max - t_min } else { 1.0 };
    let sx = |p: f64| MARGIN + (p - p_min) / p_span * (W - 2.0 * MARGIN);
    // Larger t drawn upward: invert the SVG y axis.
    let sy = |t: f64| H - MARGIN - (t - t_min) / t_span * (H - 2.0 * MARGIN);
    let mut poly = String::new();
    for (p, t) in ps.iter().zip(ts.iter()) {
        let _ = write!(poly, "{:.3},{:.3} ", sx(*p), sy(*t));
    }
    format!(
        concat!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" ",
            "viewBox=\"0 0 {w} {h}\">\n",
            "  <line x1=\"{ax:.3}\" y1=\"{y0:.3}\" x2=\"{ax:.3}\" y2=\"{y1:.3}\" ",
            "stroke=\"#999\" stroke-width=\"0.5\"/>\n",
            "  <polyline fill=\"none\" stroke=\"#1a6\" stroke-width=\"1.5\" points=\"{pts}\"/>\n",
            "</svg>\n"
        ),
        w = W,
        h = H,
        ax = sx(0.0f64.clamp(p_min, p_max)),
        y0 = sy(t_min),
        y1 = sy(t_max),
        pts = poly.trim_end()
    )
}

fn bounds(values: &[f64]) -> (f64, f64) {
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    for &v in values {
        min = min.min(v);
        max = max.max(v);
    }
    if !min.is_finite() || !max.is_finite() {
        (0.0, 1.0)
    } else {
        (min, max)
    }
}
