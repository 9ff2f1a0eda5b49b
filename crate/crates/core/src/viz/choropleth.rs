use std::collections::BTreeMap;
use std::sync::OnceLock;

use rayon::prelude::*;
use serde::Deserialize;

use super::{escape, legend, px, RenderSpec, Svg};
use crate::error::{Error, Result};
use crate::ingestion::RegionSnapshot;

const WORLD_JSON: &str = include_str!("../../data/world.json");
const NEUTRAL: &str = "#d9d9d9";
const LAT_TOP: f64 = 85.0;
const LAT_BOTTOM: f64 = -60.0;

/// Simplified outline of one country, rings of (lon, lat) pairs.
#[derive(Debug, Clone, Deserialize)]
pub struct CountryShape {
    pub name: String,
    pub rings: Vec<Vec<[f64; 2]>>,
}

/// Bundled coarse world geometry keyed by ISO alpha-2 code.
pub fn world_geometry() -> &'static BTreeMap<String, CountryShape> {
    static WORLD: OnceLock<BTreeMap<String, CountryShape>> = OnceLock::new();
    WORLD.get_or_init(|| serde_json::from_str(WORLD_JSON).expect("bundled world geometry is valid"))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChoroplethFrame {
    pub svg: String,
    /// Snapshot locations with no geometry to draw.
    pub warnings: Vec<String>,
}

struct Projection {
    x0: f64,
    y0: f64,
    w: f64,
    h: f64,
}

impl Projection {
    /// Equirectangular projection fitted inside the canvas.
    fn new(spec: &RenderSpec) -> Self {
        let top = if spec.title.is_empty() { 16.0 } else { 40.0 };
        let bottom = 48.0;
        let avail_w = spec.width as f64 - 32.0;
        let avail_h = (spec.height as f64 - top - bottom).max(1.0);
        let aspect = 360.0 / (LAT_TOP - LAT_BOTTOM);
        let (w, h) = if avail_w / avail_h > aspect {
            (avail_h * aspect, avail_h)
        } else {
            (avail_w, avail_w / aspect)
        };
        Projection {
            x0: (spec.width as f64 - w) / 2.0,
            y0: top,
            w: w.max(1.0),
            h: h.max(1.0),
        }
    }

    fn project(&self, [lon, lat]: [f64; 2]) -> (f64, f64) {
        (
            self.x0 + (lon + 180.0) / 360.0 * self.w,
            self.y0 + (LAT_TOP - lat.clamp(LAT_BOTTOM, LAT_TOP)) / (LAT_TOP - LAT_BOTTOM) * self.h,
        )
    }

    fn path(&self, shape: &CountryShape) -> String {
        let mut d = String::new();
        for ring in &shape.rings {
            for (k, p) in ring.iter().enumerate() {
                let (x, y) = self.project(*p);
                d.push_str(if k == 0 { "M" } else { "L" });
                d.push_str(&px(x));
                d.push(' ');
                d.push_str(&px(y));
            }
            d.push('Z');
        }
        d
    }
}

fn render_frame(
    snapshot: &RegionSnapshot,
    spec: &RenderSpec,
    proj: &Projection,
) -> ChoroplethFrame {
    let world = world_geometry();
    let mut svg = Svg::new(spec);
    svg.line(format!(
        r##"<text class="window" x="{}" y="{}" font-size="12">{} – {}</text>"##,
        px(proj.x0),
        px(proj.y0 + proj.h + 16.0),
        snapshot.start,
        snapshot.end
    ));
    if let Some((geo, _)) = snapshot.dominant() {
        svg.line(format!(
            r##"<text class="dominant" x="{}" y="{}" font-size="12" text-anchor="end">dominant: {}</text>"##,
            px(proj.x0 + proj.w),
            px(proj.y0 + proj.h + 16.0),
            escape(geo)
        ));
    }
    svg.line(r##"<g class="regions" stroke="#ffffff" stroke-width="0.5">"##);
    for (code, shape) in world {
        let (fill, value) = match snapshot.values.get(code) {
            Some(v) => (spec.color_map.sample(v / 100.0), format!("{v:.1}")),
            None => (NEUTRAL.to_string(), "no data".to_string()),
        };
        svg.line(format!(
            r##"<path class="region" data-geo="{}" fill="{fill}" d="{}"><title>{}: {value}</title></path>"##,
            escape(code),
            proj.path(shape),
            escape(&shape.name)
        ));
    }
    svg.line("</g>");
    legend(
        &mut svg,
        spec.color_map,
        proj.x0,
        proj.y0 + proj.h + 24.0,
        200.0,
        ["0", "50", "100"],
    );

    let warnings = snapshot
        .values
        .keys()
        .filter(|g| !world.contains_key(*g))
        .map(|g| {
            format!(
                "{}..{}: no geometry for `{g}`",
                snapshot.start, snapshot.end
            )
        })
        .collect();
    ChoroplethFrame {
        svg: svg.finish(),
        warnings,
    }
}

/// One map per snapshot, all sharing the projection and the 0–100 scale.
pub fn render_choropleth_frames(
    snapshots: &[RegionSnapshot],
    spec: &RenderSpec,
) -> Result<Vec<ChoroplethFrame>> {
    spec.validate()?;
    if snapshots.is_empty() {
        return Err(Error::InsufficientData("no snapshots to render".into()));
    }
    let proj = Projection::new(spec);
    Ok(snapshots
        .par_iter()
        .map(|s| render_frame(s, spec, &proj))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::viz::ColorMap;

    fn snapshot(values: &[(&str, f64)]) -> RegionSnapshot {
        RegionSnapshot {
            keyword: "coronavirus".into(),
            start: "2020-01-01".parse().unwrap(),
            end: "2020-01-07".parse().unwrap(),
            values: values.iter().map(|(g, v)| (g.to_string(), *v)).collect(),
            warnings: vec![],
        }
    }

    fn fills(svg: &str) -> BTreeMap<String, String> {
        svg.lines()
            .filter(|l| l.contains(r##"class="region""##))
            .map(|l| {
                let g = l.find("data-geo=\"").unwrap() + 10;
                let f = l.find("fill=\"").unwrap() + 6;
                (l[g..g + 2].to_string(), l[f..f + 7].to_string())
            })
            .collect()
    }

    fn spec() -> RenderSpec {
        RenderSpec::default().with_color_map(ColorMap::Sequential)
    }

    #[test]
    fn single_country_lit() {
        let frames = render_choropleth_frames(&[snapshot(&[("CN", 100.0)])], &spec()).unwrap();
        let f = fills(&frames[0].svg);
        assert_eq!(f.len(), world_geometry().len());
        assert_eq!(f["CN"], ColorMap::Sequential.sample(1.0));
        assert!(f
            .iter()
            .filter(|(g, _)| *g != "CN")
            .all(|(_, c)| c == NEUTRAL));
        assert!(frames[0].svg.contains("dominant: CN"));
    }

    #[test]
    fn identical_snapshots_identical_frames() {
        let s = snapshot(&[("IT", 100.0), ("ES", 60.0)]);
        let frames = render_choropleth_frames(&[s.clone(), s], &spec()).unwrap();
        assert_eq!(frames.len(), 2);
        assert_eq!(frames[0], frames[1]);
    }

    #[test]
    fn missing_geometry_warns() {
        let frames =
            render_choropleth_frames(&[snapshot(&[("IT", 100.0), ("XK", 40.0)])], &spec()).unwrap();
        assert_eq!(frames[0].warnings.len(), 1);
        assert!(frames[0].warnings[0].contains("XK"));
    }

    #[test]
    fn empty_sequence_rejected() {
        assert!(render_choropleth_frames(&[], &spec()).is_err());
    }
}
