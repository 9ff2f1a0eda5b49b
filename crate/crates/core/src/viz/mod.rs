//! Deterministic SVG figures and graph exports.
//!
//! Every renderer is a pure function of its inputs and a [`RenderSpec`];
//! coordinates are written with fixed precision so identical inputs give
//! byte-identical documents.

mod choropleth;
mod export;
mod heatmap;
mod layout;
mod line;
mod tree;

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use choropleth::{render_choropleth_frames, world_geometry, ChoroplethFrame, CountryShape};
pub use export::{export_graph, parse_graph_json, GraphFormat};
pub use heatmap::render_heatmap;
pub use layout::force_layout;
pub use line::render_line_chart;
pub use tree::render_tree;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ColorMap {
    /// Blue → white → red.
    Diverging,
    /// Near-white → dark red.
    Sequential,
}

impl ColorMap {
    fn stops(self) -> &'static [[u8; 3]] {
        match self {
            ColorMap::Diverging => &[[33, 102, 172], [247, 247, 247], [178, 24, 43]],
            ColorMap::Sequential => &[[255, 245, 240], [251, 106, 74], [103, 0, 13]],
        }
    }

    /// Colour at `t` in [0, 1] (clamped), as `#rrggbb`.
    pub fn sample(self, t: f64) -> String {
        let stops = self.stops();
        let t = if t.is_nan() { 0.0 } else { t.clamp(0.0, 1.0) };
        let pos = t * (stops.len() - 1) as f64;
        let i = (pos.floor() as usize).min(stops.len() - 2);
        let f = pos - i as f64;
        let mix = |a: u8, b: u8| (a as f64 + (b as f64 - a as f64) * f).round() as u8;
        let (a, b) = (stops[i], stops[i + 1]);
        format!(
            "#{:02x}{:02x}{:02x}",
            mix(a[0], b[0]),
            mix(a[1], b[1]),
            mix(a[2], b[2])
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RenderSpec {
    pub width: u32,
    pub height: u32,
    pub color_map: ColorMap,
    /// Seed for anything randomised (the tree layout).
    pub seed: u64,
    pub title: String,
}

impl Default for RenderSpec {
    fn default() -> Self {
        RenderSpec {
            width: 960,
            height: 640,
            color_map: ColorMap::Diverging,
            seed: 42,
            title: String::new(),
        }
    }
}

impl RenderSpec {
    pub fn titled(title: impl Into<String>) -> Self {
        RenderSpec {
            title: title.into(),
            ..Default::default()
        }
    }

    pub fn with_color_map(mut self, color_map: ColorMap) -> Self {
        self.color_map = color_map;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_size(mut self, width: u32, height: u32) -> Self {
        self.width = width;
        self.height = height;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.width == 0 || self.height == 0 {
            return Err(Error::InvalidValue(format!(
                "render size {}×{} must be positive",
                self.width, self.height
            )));
        }
        Ok(())
    }
}

pub(crate) fn escape(text: &str) -> String {
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

/// Fixed-precision coordinate.
pub(crate) fn px(v: f64) -> String {
    let s = format!("{v:.2}");
    if s == "-0.00" {
        "0.00".into()
    } else {
        s
    }
}

pub(crate) struct Svg {
    out: String,
}

impl Svg {
    pub(crate) fn new(spec: &RenderSpec) -> Self {
        let mut out = String::new();
        writeln!(out, r##"<?xml version="1.0" encoding="UTF-8"?>"##).unwrap();
        writeln!(
            out,
            r##"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif">"##,
            w = spec.width,
            h = spec.height
        )
        .unwrap();
        writeln!(
            out,
            r##"<rect width="{}" height="{}" fill="#ffffff"/>"##,
            spec.width, spec.height
        )
        .unwrap();
        if !spec.title.is_empty() {
            writeln!(
                out,
                r##"<text class="title" x="{}" y="24" font-size="16" text-anchor="middle">{}</text>"##,
                px(spec.width as f64 / 2.0),
                escape(&spec.title)
            )
            .unwrap();
        }
        Svg { out }
    }

    pub(crate) fn line(&mut self, s: impl AsRef<str>) {
        self.out.push_str(s.as_ref());
        self.out.push('\n');
    }

    pub(crate) fn finish(mut self) -> String {
        self.out.push_str("</svg>\n");
        self.out
    }
}

/// Horizontal gradient legend built from discrete swatches.
pub(crate) fn legend(svg: &mut Svg, map: ColorMap, x: f64, y: f64, width: f64, labels: [&str; 3]) {
    const SWATCHES: usize = 20;
    let w = width / SWATCHES as f64;
    svg.line(r##"<g class="legend">"##);
    for k in 0..SWATCHES {
        let t = (k as f64 + 0.5) / SWATCHES as f64;
        svg.line(format!(
            r##"<rect x="{}" y="{}" width="{}" height="10" fill="{}"/>"##,
            px(x + k as f64 * w),
            px(y),
            px(w),
            map.sample(t)
        ));
    }
    for (k, label) in labels.iter().enumerate() {
        svg.line(format!(
            r##"<text x="{}" y="{}" font-size="10" text-anchor="middle">{}</text>"##,
            px(x + width * k as f64 / 2.0),
            px(y + 22.0),
            escape(label)
        ));
    }
    svg.line("</g>");
}
