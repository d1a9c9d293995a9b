//! Self-contained SVG scatter and line plots.

use std::fmt::Write;

use crate::CliError;

const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];
const MARGIN: f64 = 60.0;

#[derive(Clone, Debug, PartialEq)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum PlotData {
    /// Points in the complex plane, drawn on a square frame centred at 0.
    Scatter(Vec<(f64, f64)>),
    /// Line series sharing one pair of axes.
    Curves(Vec<Series>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct PlotStyle {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub width: f64,
    pub height: f64,
}

impl PlotStyle {
    pub fn new(title: &str, x_label: &str, y_label: &str) -> Self {
        Self {
            title: title.into(),
            x_label: x_label.into(),
            y_label: y_label.into(),
            width: 640.0,
            height: 480.0,
        }
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

struct Frame {
    x: (f64, f64),
    y: (f64, f64),
    width: f64,
    height: f64,
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        MARGIN + (x - self.x.0) / (self.x.1 - self.x.0) * (self.width - 2.0 * MARGIN)
    }

    fn py(&self, y: f64) -> f64 {
        self.height - MARGIN - (y - self.y.0) / (self.y.1 - self.y.0) * (self.height - 2.0 * MARGIN)
    }
}

fn padded(lo: f64, hi: f64) -> (f64, f64) {
    if hi > lo {
        let pad = 0.05 * (hi - lo);
        (lo - pad, hi + pad)
    } else {
        (lo - 1.0, hi + 1.0)
    }
}

fn axes(svg: &mut String, f: &Frame, style: &PlotStyle) {
    let (x0, x1, y0, y1) = (MARGIN, f.width - MARGIN, MARGIN, f.height - MARGIN);
    let _ = writeln!(
        svg,
        r##"<rect x="{x0}" y="{y0}" width="{}" height="{}" fill="none" stroke="#000"/>"##,
        x1 - x0,
        y1 - y0
    );
    for i in 0..=4 {
        let t = i as f64 / 4.0;
        let (vx, vy) = (f.x.0 + t * (f.x.1 - f.x.0), f.y.0 + t * (f.y.1 - f.y.0));
        let (px, py) = (f.px(vx), f.py(vy));
        let _ = writeln!(svg, r##"<line x1="{px:.2}" y1="{y1}" x2="{px:.2}" y2="{:.2}" stroke="#000"/>"##, y1 + 5.0);
        let _ = writeln!(
            svg,
            r#"<text x="{px:.2}" y="{:.2}" font-size="11" text-anchor="middle">{vx:.3}</text>"#,
            y1 + 18.0
        );
        let _ = writeln!(svg, r##"<line x1="{:.2}" y1="{py:.2}" x2="{x0}" y2="{py:.2}" stroke="#000"/>"##, x0 - 5.0);
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" font-size="11" text-anchor="end">{vy:.3}</text>"#,
            x0 - 8.0,
            py + 4.0
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" font-size="14" text-anchor="middle">{}</text>"#,
        f.width / 2.0,
        MARGIN / 2.0,
        escape(&style.title)
    );
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" font-size="12" text-anchor="middle">{}</text>"#,
        f.width / 2.0,
        f.height - 15.0,
        escape(&style.x_label)
    );
    let _ = writeln!(
        svg,
        r#"<text x="15" y="{:.2}" font-size="12" text-anchor="middle" transform="rotate(-90 15 {:.2})">{}</text>"#,
        f.height / 2.0,
        f.height / 2.0,
        escape(&style.y_label)
    );
}

/// Renders `data` as an SVG document; identical input gives identical bytes.
pub fn emit_plot(data: &PlotData, style: &PlotStyle) -> Result<String, CliError> {
    let finite = |p: &&(f64, f64)| p.0.is_finite() && p.1.is_finite();
    let frame = match data {
        PlotData::Scatter(points) => {
            if points.is_empty() {
                return Err(CliError::Plot("scatter plot needs at least one point".into()));
            }
            let m = points.iter().filter(finite).fold(0.0f64, |m, p| m.max(p.0.abs()).max(p.1.abs()));
            let m = if m > 0.0 { 1.05 * m } else { 1.0 };
            Frame {
                x: (-m, m),
                y: (-m, m),
                width: style.width,
                height: style.height,
            }
        }
        PlotData::Curves(series) => {
            if series.is_empty() || series.iter().any(|s| s.points.is_empty()) {
                return Err(CliError::Plot("line plot needs nonempty series".into()));
            }
            let all = || series.iter().flat_map(|s| s.points.iter()).filter(finite);
            let (xl, xh) = all().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), p| (l.min(p.0), h.max(p.0)));
            let (yl, yh) = all().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), p| (l.min(p.1), h.max(p.1)));
            if !xl.is_finite() || !yl.is_finite() {
                return Err(CliError::Plot("line plot has no finite points".into()));
            }
            Frame {
                x: padded(xl, xh),
                y: padded(yl, yh),
                width: style.width,
                height: style.height,
            }
        }
    };
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#,
        w = style.width,
        h = style.height
    );
    let _ = writeln!(svg, r##"<rect width="100%" height="100%" fill="#fff"/>"##);
    axes(&mut svg, &frame, style);
    match data {
        PlotData::Scatter(points) => {
            for p in points.iter().filter(finite) {
                let _ = writeln!(
                    svg,
                    r#"<circle cx="{:.2}" cy="{:.2}" r="1.5" fill="{}"/>"#,
                    frame.px(p.0),
                    frame.py(p.1),
                    COLORS[0]
                );
            }
        }
        PlotData::Curves(series) => {
            for (i, s) in series.iter().enumerate() {
                let color = COLORS[i % COLORS.len()];
                let coords: Vec<String> = s
                    .points
                    .iter()
                    .filter(finite)
                    .map(|p| format!("{:.2},{:.2}", frame.px(p.0), frame.py(p.1)))
                    .collect();
                let _ = writeln!(
                    svg,
                    r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
                    coords.join(" ")
                );
                let ly = MARGIN + 15.0 + 18.0 * i as f64;
                let lx = frame.width - MARGIN - 150.0;
                let _ = writeln!(
                    svg,
                    r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="2"/>"#,
                    lx + 25.0
                );
                let _ = writeln!(
                    svg,
                    r#"<text x="{:.2}" y="{:.2}" font-size="12">{}</text>"#,
                    lx + 30.0,
                    ly + 4.0,
                    escape(&s.label)
                );
            }
        }
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}
