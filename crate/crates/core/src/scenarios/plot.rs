//! SVG line plots of CSV columns against `t`.

use std::fmt::Write as _;
use std::path::Path;

use super::output::{read_csv, CsvTable};
use crate::error::{Error, Result};

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 500.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 160.0;
const MARGIN_TOP: f64 = 30.0;
const MARGIN_BOTTOM: f64 = 55.0;
const TICKS: usize = 5;

const PALETTE: [&str; 8] = [
    "#d62728", "#1f77b4", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];

fn color_for(column: &str, index: usize) -> &'static str {
    match column {
        "discord" => "#000000",
        "concurrence" => "#1f77b4",
        "S_A" => "#c2185b",
        _ => PALETTE[index % PALETTE.len()],
    }
}

fn dash_for(column: &str) -> Option<&'static str> {
    match column {
        "S_A" | "S_B" | "S_AB" => Some("8,4"),
        _ => None,
    }
}

fn coord(v: f64) -> String {
    format!("{v:.2}")
}

fn tick_label(v: f64) -> String {
    if v == 0.0 {
        "0".into()
    } else if (1e-2..1e4).contains(&v.abs()) {
        format!("{v:.3}")
    } else {
        format!("{v:.2e}")
    }
}

/// Renders `columns` of `table` as an SVG document.
pub fn render_svg(table: &CsvTable, columns: &[String]) -> Result<String> {
    if columns.is_empty() {
        return Err(Error::InvalidParameter("no columns selected for plotting".into()));
    }
    let t = table
        .column("t")
        .ok_or_else(|| Error::InvalidParameter("CSV has no 't' column".into()))?;
    let mut series = Vec::with_capacity(columns.len());
    for name in columns {
        let col = table
            .column(name)
            .ok_or_else(|| Error::InvalidParameter(format!("column '{name}' not found in CSV")))?;
        let points: Vec<(f64, f64)> = t
            .iter()
            .zip(col)
            .filter_map(|(x, y)| Some((x.as_ref().copied()?, y.as_ref().copied()?)))
            .collect();
        series.push((name.as_str(), points));
    }

    let xs = series.iter().flat_map(|(_, p)| p.iter().map(|q| q.0));
    let (x_min, x_max) = bounds(xs, (0.0, 1.0));
    let ys = series.iter().flat_map(|(_, p)| p.iter().map(|q| q.1));
    let (y_lo, y_hi) = bounds(ys, (0.0, 1.0));
    let (y_min, y_max) = (y_lo.min(0.0), y_hi.max(1.0).max(y_lo + 1e-12));

    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let sx = |x: f64| MARGIN_LEFT + (x - x_min) / (x_max - x_min) * plot_w;
    let sy = |y: f64| MARGIN_TOP + (1.0 - (y - y_min) / (y_max - y_min)) * plot_h;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<rect x="{}" y="{}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        coord(MARGIN_LEFT),
        coord(MARGIN_TOP),
        coord(plot_w),
        coord(plot_h)
    );
    for i in 0..=TICKS {
        let f = i as f64 / TICKS as f64;
        let xv = x_min + f * (x_max - x_min);
        let yv = y_min + f * (y_max - y_min);
        let (x, y) = (sx(xv), sy(yv));
        let bottom = MARGIN_TOP + plot_h;
        let _ = writeln!(
            svg,
            r#"<line x1="{0}" y1="{1}" x2="{0}" y2="{2}" stroke="black"/><text x="{0}" y="{3}" text-anchor="middle">{4}</text>"#,
            coord(x),
            coord(bottom),
            coord(bottom + 5.0),
            coord(bottom + 20.0),
            tick_label(xv)
        );
        let _ = writeln!(
            svg,
            r#"<line x1="{0}" y1="{1}" x2="{2}" y2="{1}" stroke="black"/><text x="{3}" y="{4}" text-anchor="end">{5}</text>"#,
            coord(MARGIN_LEFT - 5.0),
            coord(y),
            coord(MARGIN_LEFT),
            coord(MARGIN_LEFT - 8.0),
            coord(y + 4.0),
            tick_label(yv)
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" text-anchor="middle">t (s)</text>"#,
        coord(MARGIN_LEFT + plot_w / 2.0),
        coord(HEIGHT - 12.0)
    );

    for (i, (name, points)) in series.iter().enumerate() {
        let color = color_for(name, i);
        let dash = dash_for(name).map(|d| format!(r#" stroke-dasharray="{d}""#)).unwrap_or_default();
        let path: Vec<String> = points.iter().map(|&(x, y)| format!("{},{}", coord(sx(x)), coord(sy(y)))).collect();
        let _ = writeln!(
            svg,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.5"{dash} points="{}"/>"#,
            path.join(" ")
        );
        let ly = MARGIN_TOP + 15.0 + 20.0 * i as f64;
        let lx = WIDTH - MARGIN_RIGHT + 15.0;
        let _ = writeln!(
            svg,
            r#"<line x1="{0}" y1="{1}" x2="{2}" y2="{1}" stroke="{color}" stroke-width="2"{dash}/><text x="{3}" y="{4}">{5}</text>"#,
            coord(lx),
            coord(ly),
            coord(lx + 25.0),
            coord(lx + 32.0),
            coord(ly + 4.0),
            escape(name)
        );
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

fn bounds(values: impl Iterator<Item = f64>, fallback: (f64, f64)) -> (f64, f64) {
    let (lo, hi) = values
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if lo > hi {
        fallback
    } else if lo == hi {
        (lo, lo + 1.0)
    } else {
        (lo, hi)
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

pub fn render_plot(csv_path: &Path, columns: &[String], out_path: &Path) -> Result<()> {
    let table = read_csv(csv_path)?;
    let svg = render_svg(&table, columns)?;
    std::fs::write(out_path, svg).map_err(|e| Error::io(out_path, e))
}
