//! Static SVG line charts with optional horizontal and vertical marker lines.
//!
//! Output is a pure function of the [`PlotSpec`]: coordinates are printed
//! with six significant digits and elements are emitted in input order.

use std::fmt::Write as _;
use std::io::Write;

use crate::error::{Result, WadeError};

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 500.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 160.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;
const TICKS: usize = 5;
const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b",
];

#[derive(Debug, Clone, PartialEq)]
pub struct PlotSeries {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

impl PlotSeries {
    pub fn new(label: impl Into<String>, points: Vec<(f64, f64)>) -> Self {
        Self {
            label: label.into(),
            points,
        }
    }
}

/// Reference line drawn across the plot at `value` with a caption.
#[derive(Debug, Clone, PartialEq)]
pub struct Marker {
    pub value: f64,
    pub caption: String,
}

impl Marker {
    pub fn new(value: f64, caption: impl Into<String>) -> Self {
        Self {
            value,
            caption: caption.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct PlotSpec {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<PlotSeries>,
    pub horizontal_markers: Vec<Marker>,
    pub vertical_markers: Vec<Marker>,
}

/// Peak barrel prices of recent crises, USD/barrel, for annotating price plots.
pub fn crisis_price_markers() -> Vec<Marker> {
    vec![
        Marker::new(146.0, "Subprime crisis peak ($146)"),
        Marker::new(85.0, "Covid-19, before the Ukraine war ($85)"),
        Marker::new(124.0, "Russo-Ukrainian war ($124)"),
    ]
}

impl PlotSpec {
    pub fn validate(&self) -> Result<()> {
        if self.series.is_empty() {
            return Err(WadeError::InvalidPlot("no series".into()));
        }
        for s in &self.series {
            if s.label.trim().is_empty() {
                return Err(WadeError::InvalidPlot("series with empty label".into()));
            }
            if s.points.is_empty() {
                return Err(WadeError::InvalidPlot(format!(
                    "series `{}` has no points",
                    s.label
                )));
            }
            if s.points
                .iter()
                .any(|(x, y)| !x.is_finite() || !y.is_finite())
            {
                return Err(WadeError::InvalidPlot(format!(
                    "series `{}` has non-finite points",
                    s.label
                )));
            }
        }
        if self
            .horizontal_markers
            .iter()
            .chain(&self.vertical_markers)
            .any(|m| !m.value.is_finite())
        {
            return Err(WadeError::InvalidPlot("non-finite marker".into()));
        }
        Ok(())
    }
}

/// Formats `x` with six significant digits, trailing zeros removed.
pub fn fmt_sig6(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return "0".into();
    }
    let magnitude = x.abs().log10().floor() as i32;
    if !(-5..=15).contains(&magnitude) {
        return format!("{x:.5e}");
    }
    let decimals = (5 - magnitude).max(0) as usize;
    let x = if magnitude > 5 {
        let unit = 10f64.powi(magnitude - 5);
        (x / unit).round() * unit
    } else {
        x
    };
    let s = format!("{x:.decimals$}");
    let s = if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    };
    if s == "-0" {
        "0".into()
    } else {
        s
    }
}

fn escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

fn padded_range(lo: f64, hi: f64) -> (f64, f64) {
    if hi > lo {
        let pad = 0.05 * (hi - lo);
        (lo - pad, hi + pad)
    } else {
        let pad = if lo == 0.0 { 1.0 } else { 0.05 * lo.abs() };
        (lo - pad, hi + pad)
    }
}

struct Frame {
    x: (f64, f64),
    y: (f64, f64),
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        LEFT + (x - self.x.0) / (self.x.1 - self.x.0) * (WIDTH - LEFT - RIGHT)
    }

    fn py(&self, y: f64) -> f64 {
        HEIGHT - BOTTOM - (y - self.y.0) / (self.y.1 - self.y.0) * (HEIGHT - TOP - BOTTOM)
    }
}

/// Renders the chart as a standalone SVG 1.1 document.
pub fn render_svg(spec: &PlotSpec) -> Result<String> {
    spec.validate()?;
    let points = spec.series.iter().flat_map(|s| s.points.iter());
    let (mut x_lo, mut x_hi, mut y_lo, mut y_hi) = (
        f64::INFINITY,
        f64::NEG_INFINITY,
        f64::INFINITY,
        f64::NEG_INFINITY,
    );
    for &(x, y) in points {
        x_lo = x_lo.min(x);
        x_hi = x_hi.max(x);
        y_lo = y_lo.min(y);
        y_hi = y_hi.max(y);
    }
    for m in &spec.horizontal_markers {
        y_lo = y_lo.min(m.value);
        y_hi = y_hi.max(m.value);
    }
    for m in &spec.vertical_markers {
        x_lo = x_lo.min(m.value);
        x_hi = x_hi.max(m.value);
    }
    let frame = Frame {
        x: padded_range(x_lo, x_hi),
        y: padded_range(y_lo, y_hi),
    };
    let f = fmt_sig6;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<?xml version="1.0" encoding="UTF-8" standalone="yes"?>"#
    );
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{}" height="{}" viewBox="0 0 {} {}">"#,
        f(WIDTH),
        f(HEIGHT),
        f(WIDTH),
        f(HEIGHT)
    );
    let _ = writeln!(
        svg,
        r#"<rect x="0" y="0" width="{}" height="{}" fill="white"/>"#,
        f(WIDTH),
        f(HEIGHT)
    );
    if !spec.title.is_empty() {
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="24" font-family="sans-serif" font-size="16" text-anchor="middle">{}</text>"#,
            f((LEFT + WIDTH - RIGHT) / 2.0),
            escape(&spec.title)
        );
    }

    // axes
    let (x0, x1) = (LEFT, WIDTH - RIGHT);
    let (y0, y1) = (HEIGHT - BOTTOM, TOP);
    let _ = writeln!(
        svg,
        r#"<g class="axes" stroke="black" stroke-width="1"><line x1="{}" y1="{}" x2="{}" y2="{}"/><line x1="{}" y1="{}" x2="{}" y2="{}"/></g>"#,
        f(x0),
        f(y0),
        f(x1),
        f(y0),
        f(x0),
        f(y0),
        f(x0),
        f(y1)
    );
    let _ = writeln!(
        svg,
        r#"<g class="ticks" font-family="sans-serif" font-size="11">"#
    );
    for i in 0..=TICKS {
        let frac = i as f64 / TICKS as f64;
        let xv = frame.x.0 + frac * (frame.x.1 - frame.x.0);
        let yv = frame.y.0 + frac * (frame.y.1 - frame.y.0);
        let (px, py) = (frame.px(xv), frame.py(yv));
        let _ = writeln!(
            svg,
            r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="black"/><text x="{}" y="{}" text-anchor="middle">{}</text>"#,
            f(px),
            f(y0),
            f(px),
            f(y0 + 5.0),
            f(px),
            f(y0 + 18.0),
            f(xv)
        );
        let _ = writeln!(
            svg,
            r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="black"/><text x="{}" y="{}" text-anchor="end">{}</text>"#,
            f(x0 - 5.0),
            f(py),
            f(x0),
            f(py),
            f(x0 - 8.0),
            f(py + 4.0),
            f(yv)
        );
    }
    let _ = writeln!(svg, "</g>");
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" font-family="sans-serif" font-size="13" text-anchor="middle">{}</text>"#,
        f((x0 + x1) / 2.0),
        f(HEIGHT - 15.0),
        escape(&spec.x_label)
    );
    let _ = writeln!(
        svg,
        r#"<text x="20" y="{}" font-family="sans-serif" font-size="13" text-anchor="middle" transform="rotate(-90 20 {})">{}</text>"#,
        f((y0 + y1) / 2.0),
        f((y0 + y1) / 2.0),
        escape(&spec.y_label)
    );

    for m in &spec.horizontal_markers {
        let py = frame.py(m.value);
        let _ = writeln!(
            svg,
            r#"<g class="marker"><line x1="{}" y1="{}" x2="{}" y2="{}" stroke="gray" stroke-dasharray="6 4"/><text x="{}" y="{}" font-family="sans-serif" font-size="10" fill="gray">{}</text></g>"#,
            f(x0),
            f(py),
            f(x1),
            f(py),
            f(x0 + 4.0),
            f(py - 3.0),
            escape(&m.caption)
        );
    }
    for m in &spec.vertical_markers {
        let px = frame.px(m.value);
        let _ = writeln!(
            svg,
            r#"<g class="marker"><line x1="{}" y1="{}" x2="{}" y2="{}" stroke="gray" stroke-dasharray="2 3"/><text x="{}" y="{}" font-family="sans-serif" font-size="10" fill="gray" transform="rotate(-90 {} {})">{}</text></g>"#,
            f(px),
            f(y0),
            f(px),
            f(y1),
            f(px - 3.0),
            f(y1 + 4.0),
            f(px - 3.0),
            f(y1 + 4.0),
            escape(&m.caption)
        );
    }

    for (idx, s) in spec.series.iter().enumerate() {
        let color = PALETTE[idx % PALETTE.len()];
        let pts: Vec<String> = s
            .points
            .iter()
            .map(|&(x, y)| format!("{},{}", f(frame.px(x)), f(frame.py(y))))
            .collect();
        let _ = writeln!(
            svg,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
            pts.join(" ")
        );
        let ly = TOP + 14.0 + 18.0 * idx as f64;
        let _ = writeln!(
            svg,
            r#"<g class="legend"><line x1="{}" y1="{}" x2="{}" y2="{}" stroke="{color}" stroke-width="2"/><text x="{}" y="{}" font-family="sans-serif" font-size="11">{}</text></g>"#,
            f(x1 + 10.0),
            f(ly),
            f(x1 + 30.0),
            f(ly),
            f(x1 + 35.0),
            f(ly + 4.0),
            escape(&s.label)
        );
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

pub fn write_svg_plot<W: Write>(spec: &PlotSpec, mut sink: W) -> Result<()> {
    let svg = render_svg(spec)?;
    sink.write_all(svg.as_bytes())?;
    sink.flush()?;
    Ok(())
}
