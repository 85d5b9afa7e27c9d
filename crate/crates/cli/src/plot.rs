//! Minimal deterministic SVG line plots on log-log axes.

use std::fmt::Write as _;
use std::path::Path;

use anyhow::{bail, Context, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

impl Series {
    pub fn new(label: impl Into<String>, points: Vec<(f64, f64)>) -> Self {
        Self { label: label.into(), points }
    }

    fn logged(&self) -> Vec<(f64, f64)> {
        self.points
            .iter()
            .filter(|(x, y)| *x > 0.0 && *y > 0.0 && x.is_finite() && y.is_finite())
            .map(|(x, y)| (x.log10(), y.log10()))
            .collect()
    }
}

const W: f64 = 640.0;
const H: f64 = 420.0;
const MARGIN: (f64, f64, f64, f64) = (70.0, 20.0, 30.0, 50.0);
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

/// Renders the series as an SVG document. Points with a non-positive
/// coordinate are dropped; at least one series needs two remaining points.
pub fn render_svg(series: &[Series], title: &str, x_label: &str, y_label: &str) -> Result<String> {
    let logged: Vec<Vec<(f64, f64)>> = series.iter().map(Series::logged).collect();
    if !logged.iter().any(|p| p.len() >= 2) {
        bail!("a plot needs at least two positive points");
    }
    let all = logged.iter().flatten();
    let (mut x0, mut x1, mut y0, mut y1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for &(x, y) in all {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    let (x0, x1) = (x0.floor(), x1.ceil().max(x0.floor() + 1.0));
    let (y0, y1) = (y0.floor(), y1.ceil().max(y0.floor() + 1.0));
    let (left, right, top, bottom) = MARGIN;
    let px = |x: f64| left + (x - x0) / (x1 - x0) * (W - left - right);
    let py = |y: f64| H - bottom - (y - y0) / (y1 - y0) * (H - top - bottom);

    let mut s = String::new();
    writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#)?;
    writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#)?;
    writeln!(s, r#"<text x="{:.1}" y="18" font-size="14" text-anchor="middle">{}</text>"#, W / 2.0, escape(title))?;
    writeln!(
        s,
        r#"<rect x="{left}" y="{top}" width="{:.1}" height="{:.1}" fill="none" stroke="black"/>"#,
        W - left - right,
        H - top - bottom
    )?;
    for k in (x0 as i64)..=(x1 as i64) {
        let x = px(k as f64);
        writeln!(s, r##"<line x1="{x:.1}" y1="{top}" x2="{x:.1}" y2="{:.1}" stroke="#ddd"/>"##, H - bottom)?;
        writeln!(
            s,
            r#"<text x="{x:.1}" y="{:.1}" font-size="11" text-anchor="middle">1e{k}</text>"#,
            H - bottom + 15.0
        )?;
    }
    for k in (y0 as i64)..=(y1 as i64) {
        let y = py(k as f64);
        writeln!(s, r##"<line x1="{left}" y1="{y:.1}" x2="{:.1}" y2="{y:.1}" stroke="#ddd"/>"##, W - right)?;
        writeln!(s, r#"<text x="{:.1}" y="{:.1}" font-size="11" text-anchor="end">1e{k}</text>"#, left - 5.0, y + 4.0)?;
    }
    writeln!(
        s,
        r#"<text x="{:.1}" y="{:.1}" font-size="12" text-anchor="middle">{}</text>"#,
        W / 2.0,
        H - 10.0,
        escape(x_label)
    )?;
    writeln!(
        s,
        r#"<text x="15" y="{:.1}" font-size="12" text-anchor="middle" transform="rotate(-90 15 {:.1})">{}</text>"#,
        H / 2.0,
        H / 2.0,
        escape(y_label)
    )?;
    for (k, (ser, pts)) in series.iter().zip(&logged).enumerate() {
        if pts.is_empty() {
            continue;
        }
        let color = COLORS[k % COLORS.len()];
        let path: Vec<String> = pts.iter().map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y))).collect();
        writeln!(s, r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#, path.join(" "))?;
        for &(x, y) in pts {
            writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="2.5" fill="{color}"/>"#, px(x), py(y))?;
        }
        let ly = top + 15.0 + 15.0 * k as f64;
        writeln!(
            s,
            r#"<text x="{:.1}" y="{ly:.1}" font-size="11" fill="{color}">{}</text>"#,
            left + 10.0,
            escape(&ser.label)
        )?;
    }
    s.push_str("</svg>\n");
    Ok(s)
}

fn escape(t: &str) -> String {
    t.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Writes [`render_svg`] output to `path`.
pub fn emit_plot(series: &[Series], path: &Path, title: &str, x_label: &str, y_label: &str) -> Result<()> {
    let svg = render_svg(series, title, x_label, y_label)?;
    std::fs::write(path, svg).with_context(|| format!("writing {}", path.display()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_points_render() {
        let s = [Series::new("a", vec![(1.0, 1.0), (10.0, 0.1)])];
        let svg = render_svg(&s, "t", "x", "y").unwrap();
        assert!(svg.starts_with("<svg") && svg.contains("polyline"));
    }

    #[test]
    fn deterministic_bytes() {
        let s = [
            Series::new("a", vec![(0.5, 2.0), (0.25, 1.0), (0.125, 0.6)]),
            Series::new("b<c", vec![(0.5, 1.0), (0.25, 3.0)]),
        ];
        assert_eq!(render_svg(&s, "t", "x", "y").unwrap(), render_svg(&s, "t", "x", "y").unwrap());
    }

    #[test]
    fn needs_two_points() {
        assert!(render_svg(&[Series::new("a", vec![(1.0, 1.0), (2.0, 0.0)])], "t", "x", "y").is_err());
    }
}
