//! CSV and SVG renderings of a report. Both are pure functions of the report,
//! so identical reports give identical bytes.

use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use super::{Check, Report};
use crate::error::Result;

pub const CSV_HEADER: [&str; 11] = [
    "experiment",
    "quantity",
    "h",
    "points",
    "input_norm",
    "output_norm",
    "ratio",
    "fitted_constant",
    "witness",
    "truncated",
    "check",
];

fn opt(v: Option<f64>) -> String {
    v.map_or_else(String::new, |x| x.to_string())
}

pub fn write_csv<W: Write>(report: &Report, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in &report.rows {
        w.write_record([
            report.experiment.name().to_string(),
            r.quantity.clone(),
            r.h.to_string(),
            r.points.to_string(),
            opt(r.input_norm),
            opt(r.output_norm),
            r.ratio.to_string(),
            opt(r.fitted_constant),
            r.witness.clone(),
            r.truncated.to_string(),
            r.check.name().to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn emit_report(report: &Report, path: &Path) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    write_csv(report, &mut out)?;
    out.flush()?;
    Ok(())
}

const WIDTH: f64 = 640.0;
const PANEL: f64 = 200.0;
const MARGIN: f64 = 60.0;
const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

/// Plot area with data bounds.
struct Frame {
    top: f64,
    x: (f64, f64),
    y: (f64, f64),
}

fn bounds(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) =
        values.filter(|v| v.is_finite()).fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if !lo.is_finite() {
        (0.0, 1.0)
    } else if hi - lo <= 1e-12 * lo.abs().max(1.0) {
        (lo - 0.5 * lo.abs().max(1.0), hi + 0.5 * hi.abs().max(1.0))
    } else {
        (lo, hi)
    }
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        MARGIN + (x - self.x.0) / (self.x.1 - self.x.0) * (WIDTH - 2.0 * MARGIN)
    }

    fn py(&self, y: f64) -> f64 {
        self.top + PANEL - (y - self.y.0) / (self.y.1 - self.y.0) * PANEL
    }

    fn axes(&self, svg: &mut String, title: &str, xlabel: &str) {
        let (l, r, b) = (MARGIN, WIDTH - MARGIN, self.top + PANEL);
        let _ = writeln!(
            svg,
            r##"<rect x="{l:.2}" y="{:.2}" width="{:.2}" height="{PANEL:.2}" fill="none" stroke="#444444"/>"##,
            self.top,
            r - l
        );
        let _ = writeln!(svg, r#"<text x="{l:.2}" y="{:.2}" font-size="13">{}</text>"#, self.top - 8.0, escape(title));
        let _ = writeln!(svg, r#"<text x="{l:.2}" y="{:.2}" font-size="10">{:.4}</text>"#, b + 14.0, self.x.0);
        let _ = writeln!(
            svg,
            r#"<text x="{r:.2}" y="{:.2}" font-size="10" text-anchor="end">{:.4}</text>"#,
            b + 14.0,
            self.x.1
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" font-size="10" text-anchor="middle">{}</text>"#,
            WIDTH / 2.0,
            b + 28.0,
            escape(xlabel)
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" font-size="10" text-anchor="end">{:.4}</text>"#,
            l - 4.0,
            b,
            self.y.0
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" font-size="10" text-anchor="end">{:.4}</text>"#,
            l - 4.0,
            self.top + 10.0,
            self.y.1
        );
    }

    fn series(&self, svg: &mut String, points: &[(f64, f64)], color: &str) {
        let finite: Vec<(f64, f64)> = points.iter().copied().filter(|p| p.0.is_finite() && p.1.is_finite()).collect();
        if finite.len() > 1 {
            let path: Vec<String> =
                finite.iter().map(|&(x, y)| format!("{:.2},{:.2}", self.px(x), self.py(y))).collect();
            let _ = writeln!(
                svg,
                r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
                path.join(" ")
            );
        }
        for &(x, y) in &finite {
            let _ = writeln!(svg, r#"<circle cx="{:.2}" cy="{:.2}" r="2.5" fill="{color}"/>"#, self.px(x), self.py(y));
        }
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Ratio-versus-resolution panel and a slice of the maximal function.
pub fn render_svg(report: &Report) -> String {
    let height = 2.0 * PANEL + 3.0 * MARGIN + 20.0;
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{height}" viewBox="0 0 {WIDTH} {height}">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{MARGIN}" y="20" font-size="15">{}: {}</text>"#,
        report.experiment.name(),
        report.verdict.name()
    );

    let quantities = report.ladder_quantities();
    let ladder: Vec<_> = report.rows.iter().filter(|r| r.check == Check::Ladder).collect();
    let top =
        Frame { top: MARGIN, x: bounds(ladder.iter().map(|r| r.h.log10())), y: bounds(ladder.iter().map(|r| r.ratio)) };
    top.axes(&mut svg, "ratio per resolution", "log10 h");
    for (k, q) in quantities.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let mut pts: Vec<(f64, f64)> =
            ladder.iter().filter(|r| r.quantity == *q).map(|r| (r.h.log10(), r.ratio)).collect();
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
        top.series(&mut svg, &pts, color);
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" font-size="10" fill="{color}" text-anchor="end">{}</text>"#,
            WIDTH - MARGIN - 4.0,
            MARGIN + 14.0 + 12.0 * k as f64,
            escape(q)
        );
    }
    if quantities.is_empty() {
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" font-size="11" text-anchor="middle">no ladder quantities</text>"#,
            WIDTH / 2.0,
            MARGIN + PANEL / 2.0
        );
    }

    let bottom = Frame {
        top: 2.0 * MARGIN + PANEL + 20.0,
        x: bounds(report.slice.iter().map(|p| p.0)),
        y: bounds(report.slice.iter().map(|p| p.1)),
    };
    let label = if report.slice_label.is_empty() { "slice" } else { report.slice_label.as_str() };
    bottom.axes(&mut svg, label, "position");
    bottom.series(&mut svg, &report.slice, PALETTE[0]);
    svg.push_str("</svg>\n");
    svg
}

pub fn write_svg(report: &Report, path: &Path) -> Result<()> {
    std::fs::write(path, render_svg(report))?;
    Ok(())
}
