//! Deterministic SVG 1.1 scatter plots of the instance space.

use std::collections::BTreeSet;
use std::fmt::Write;

use serde::{Deserialize, Serialize};

use super::ReportError;
use crate::footprint::{ConvexPolygon, Footprint};
use crate::model::{Coordinates2D, Outcome};

/// Colour-blind-safe cycle (Okabe-Ito, extended with three Tol colours).
const COLORBLIND_SAFE: [&str; 11] = [
    "#0072B2", "#E69F00", "#009E73", "#CC79A7", "#56B4E9", "#D55E00", "#F0E442", "#000000",
    "#882255", "#44AA99", "#999933",
];
const GOOD_COLOR: &str = "#0072B2";
const BAD_COLOR: &str = "#D55E00";
const MISSING_COLOR: &str = "#BBBBBB";

/// Low end of the feature colour map.
pub const BLUE_END: [u8; 3] = [30, 60, 200];
/// High end of the feature colour map.
pub const YELLOW_END: [u8; 3] = [250, 220, 40];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Palette {
    ColorblindSafe,
}

impl Palette {
    fn colors(self) -> &'static [&'static str] {
        match self {
            Palette::ColorblindSafe => &COLORBLIND_SAFE,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlotSpec {
    pub width: f64,
    pub height: f64,
    pub margin: f64,
    pub point_radius: f64,
    pub palette: Palette,
    pub x_label: String,
    pub y_label: String,
}

impl Default for PlotSpec {
    fn default() -> Self {
        Self {
            width: 640.0,
            height: 520.0,
            margin: 60.0,
            point_radius: 3.0,
            palette: Palette::ColorblindSafe,
            x_label: "z1".into(),
            y_label: "z2".into(),
        }
    }
}

impl PlotSpec {
    fn validate(&self) -> Result<(), ReportError> {
        if !(self.width > 2.0 * self.margin && self.height > 2.0 * self.margin) {
            return Err(ReportError::InvalidSpec(
                "width and height must exceed twice the margin".into(),
            ));
        }
        if !(self.point_radius > 0.0) {
            return Err(ReportError::InvalidSpec("point radius must be positive".into()));
        }
        Ok(())
    }
}

/// Affine data-to-pixel mapping with 5% padding on each side.
struct Axes {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
    spec: PlotSpec,
}

impl Axes {
    fn fit(points: &[[f64; 2]], spec: &PlotSpec) -> Self {
        let range = |k: usize| {
            let lo = points.iter().map(|p| p[k]).fold(f64::INFINITY, f64::min);
            let hi = points.iter().map(|p| p[k]).fold(f64::NEG_INFINITY, f64::max);
            if hi > lo {
                let pad = 0.05 * (hi - lo);
                (lo - pad, hi + pad)
            } else {
                (lo - 0.5, hi + 0.5)
            }
        };
        let (x0, x1) = range(0);
        let (y0, y1) = range(1);
        Self {
            x0,
            x1,
            y0,
            y1,
            spec: spec.clone(),
        }
    }

    fn px(&self, p: [f64; 2]) -> (f64, f64) {
        let s = &self.spec;
        let x = s.margin + (p[0] - self.x0) / (self.x1 - self.x0) * (s.width - 2.0 * s.margin);
        let y = s.height - s.margin - (p[1] - self.y0) / (self.y1 - self.y0) * (s.height - 2.0 * s.margin);
        (x, y)
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn open(doc: &mut String, spec: &PlotSpec, title: &str) {
    let (w, h) = (spec.width, spec.height);
    let _ = writeln!(doc, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        doc,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w:.0}" height="{h:.0}" viewBox="0 0 {w:.0} {h:.0}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(doc, "<title>{}</title>", escape(title));
    let _ = writeln!(doc, r##"<rect x="0" y="0" width="{w:.0}" height="{h:.0}" fill="#FFFFFF"/>"##);
}

fn axes_frame(doc: &mut String, axes: &Axes) {
    let s = &axes.spec;
    let (left, right) = (s.margin, s.width - s.margin);
    let (top, bottom) = (s.margin, s.height - s.margin);
    let _ = writeln!(
        doc,
        r##"<rect x="{left:.2}" y="{top:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="#444444" stroke-width="1"/>"##,
        right - left,
        bottom - top
    );
    let _ = writeln!(
        doc,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
        0.5 * (left + right),
        bottom + 0.6 * s.margin,
        escape(&s.x_label)
    );
    let _ = writeln!(
        doc,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" transform="rotate(-90 {:.2} {:.2})">{}</text>"#,
        left - 0.6 * s.margin,
        0.5 * (top + bottom),
        left - 0.6 * s.margin,
        0.5 * (top + bottom),
        escape(&s.y_label)
    );
    for (x, anchor) in [(axes.x0, "start"), (axes.x1, "end")] {
        let (px, _) = axes.px([x, axes.y0]);
        let _ = writeln!(
            doc,
            r#"<text x="{px:.2}" y="{:.2}" text-anchor="{anchor}" font-size="10">{x:.2}</text>"#,
            bottom + 14.0
        );
    }
    for (y, base) in [(axes.y0, "auto"), (axes.y1, "hanging")] {
        let (_, py) = axes.px([axes.x0, y]);
        let _ = writeln!(
            doc,
            r#"<text x="{:.2}" y="{py:.2}" text-anchor="end" dominant-baseline="{base}" font-size="10">{y:.2}</text>"#,
            left - 4.0
        );
    }
}

fn polygon(doc: &mut String, axes: &Axes, poly: &ConvexPolygon, stroke: &str, dash: bool, class: &str) {
    if poly.is_degenerate() {
        return;
    }
    let pts: Vec<String> = poly
        .vertices()
        .iter()
        .map(|v| {
            let (x, y) = axes.px(*v);
            format!("{x:.2},{y:.2}")
        })
        .collect();
    let dash = if dash { r#" stroke-dasharray="4 3""# } else { "" };
    let _ = writeln!(
        doc,
        r#"<polygon class="{class}" points="{}" fill="none" stroke="{stroke}" stroke-width="1.5"{dash}/>"#,
        pts.join(" ")
    );
}

fn circle(doc: &mut String, axes: &Axes, p: [f64; 2], fill: &str) {
    let (x, y) = axes.px(p);
    let _ = writeln!(
        doc,
        r#"<circle cx="{x:.2}" cy="{y:.2}" r="{:.2}" fill="{fill}" fill-opacity="0.85"/>"#,
        axes.spec.point_radius
    );
}

/// Legend entries laid out in a row along the top margin.
fn legend(doc: &mut String, spec: &PlotSpec, entries: &[(String, String)]) {
    let _ = writeln!(doc, r#"<g class="legend">"#);
    let mut x = spec.margin;
    let y = 0.35 * spec.margin;
    for (label, color) in entries {
        let _ = writeln!(
            doc,
            r#"<rect x="{x:.2}" y="{:.2}" width="10" height="10" fill="{color}"/>"#,
            y - 9.0
        );
        let _ = writeln!(doc, r#"<text x="{:.2}" y="{y:.2}">{}</text>"#, x + 14.0, escape(label));
        x += 24.0 + 7.0 * label.chars().count() as f64;
    }
    let _ = writeln!(doc, "</g>");
}

/// GOOD/BAD scatter with the footprint hull (solid) and the contradicted
/// region (dashed). MISSING instances are drawn in grey.
pub fn render_footprint_svg(
    coords: &Coordinates2D,
    labels: &[Outcome],
    footprint: &Footprint,
    spec: &PlotSpec,
) -> Result<String, ReportError> {
    spec.validate()?;
    if coords.is_empty() {
        return Err(ReportError::EmptyInput);
    }
    if coords.len() != labels.len() {
        return Err(ReportError::InvalidSpec("labels not aligned with coordinates".into()));
    }
    let axes = Axes::fit(&coords.points, spec);
    let mut doc = String::new();
    open(&mut doc, spec, &format!("Footprint of {}", footprint.algorithm));
    axes_frame(&mut doc, &axes);
    polygon(&mut doc, &axes, &footprint.good_hull, GOOD_COLOR, false, "footprint");
    polygon(&mut doc, &axes, &footprint.contradiction, BAD_COLOR, true, "contradiction");
    for (p, l) in coords.points.iter().zip(labels) {
        let color = match l {
            Outcome::Good => GOOD_COLOR,
            Outcome::Bad => BAD_COLOR,
            Outcome::Missing => MISSING_COLOR,
        };
        circle(&mut doc, &axes, *p, color);
    }
    let mut entries = vec![
        ("GOOD".to_string(), GOOD_COLOR.to_string()),
        ("BAD".to_string(), BAD_COLOR.to_string()),
    ];
    if labels.contains(&Outcome::Missing) {
        entries.push(("MISSING".to_string(), MISSING_COLOR.to_string()));
    }
    legend(&mut doc, spec, &entries);
    doc.push_str("</svg>\n");
    Ok(doc)
}

/// Linear blue-to-yellow colour map on `[0, 1]`, rounded to the nearest
/// integer channel value.
pub fn feature_color(t: f64) -> [u8; 3] {
    let t = t.clamp(0.0, 1.0);
    let mut out = [0u8; 3];
    for k in 0..3 {
        let (a, b) = (BLUE_END[k] as f64, YELLOW_END[k] as f64);
        out[k] = (a + t * (b - a)).round() as u8;
    }
    out
}

fn rgb(c: [u8; 3]) -> String {
    format!("rgb({},{},{})", c[0], c[1], c[2])
}

/// Scatter coloured by one feature's min-max normalized value, with a colour
/// bar labelled by the raw `range` endpoints.
pub fn render_feature_svg(
    coords: &Coordinates2D,
    values: &[f64],
    feature: &str,
    range: (f64, f64),
    spec: &PlotSpec,
) -> Result<String, ReportError> {
    spec.validate()?;
    if coords.is_empty() {
        return Err(ReportError::EmptyInput);
    }
    if coords.len() != values.len() {
        return Err(ReportError::InvalidSpec("values not aligned with coordinates".into()));
    }
    let axes = Axes::fit(&coords.points, spec);
    let mut doc = String::new();
    open(&mut doc, spec, &format!("Feature {feature}"));
    let _ = writeln!(
        doc,
        r#"<defs><linearGradient id="colorbar" x1="0" y1="0" x2="1" y2="0"><stop offset="0" stop-color="{}"/><stop offset="1" stop-color="{}"/></linearGradient></defs>"#,
        rgb(BLUE_END),
        rgb(YELLOW_END)
    );
    axes_frame(&mut doc, &axes);
    for (p, v) in coords.points.iter().zip(values) {
        circle(&mut doc, &axes, *p, &rgb(feature_color(*v)));
    }
    let (x, y) = (spec.margin, 0.2 * spec.margin);
    let bar_w = (spec.width - 2.0 * spec.margin).min(200.0);
    let _ = writeln!(doc, r#"<g class="colorbar">"#);
    let _ = writeln!(
        doc,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
        x + spec.width - 2.0 * spec.margin,
        y + 10.0,
        escape(feature)
    );
    let _ = writeln!(
        doc,
        r##"<rect x="{x:.2}" y="{y:.2}" width="{bar_w:.2}" height="10" fill="url(#colorbar)" stroke="#444444" stroke-width="0.5"/>"##
    );
    let _ = writeln!(
        doc,
        r#"<text x="{x:.2}" y="{:.2}" font-size="10">{:.4}</text>"#,
        y + 22.0,
        range.0
    );
    let _ = writeln!(
        doc,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="end" font-size="10">{:.4}</text>"#,
        x + bar_w,
        y + 22.0,
        range.1
    );
    let _ = writeln!(doc, "</g>");
    doc.push_str("</svg>\n");
    Ok(doc)
}

/// Scatter coloured by benchmark tag, legend sorted by tag.
pub fn render_dataset_svg(coords: &Coordinates2D, tags: &[String], spec: &PlotSpec) -> Result<String, ReportError> {
    spec.validate()?;
    if coords.is_empty() || tags.is_empty() {
        return Err(ReportError::EmptyInput);
    }
    if coords.len() != tags.len() {
        return Err(ReportError::InvalidSpec("tags not aligned with coordinates".into()));
    }
    let sorted: Vec<&String> = tags.iter().collect::<BTreeSet<_>>().into_iter().collect();
    let colors = spec.palette.colors();
    let color_of = |t: &String| colors[sorted.iter().position(|s| *s == t).expect("tag present") % colors.len()];
    let axes = Axes::fit(&coords.points, spec);
    let mut doc = String::new();
    open(&mut doc, spec, "Benchmark datasets");
    axes_frame(&mut doc, &axes);
    for (p, t) in coords.points.iter().zip(tags) {
        circle(&mut doc, &axes, *p, color_of(t));
    }
    let entries: Vec<(String, String)> = sorted
        .iter()
        .map(|t| ((*t).clone(), color_of(t).to_string()))
        .collect();
    legend(&mut doc, spec, &entries);
    doc.push_str("</svg>\n");
    Ok(doc)
}
