use super::{escape, px, RenderSpec, Svg};
use crate::error::{Error, Result};
use crate::timeseries::LocationSeries;

const LEFT: f64 = 56.0;
const RIGHT: f64 = 24.0;
const TOP: f64 = 44.0;
const BOTTOM: f64 = 48.0;
const X_TICKS: usize = 6;

/// Relative search volume over time as a single polyline on a 0–100 axis.
pub fn render_line_chart(series: &LocationSeries, spec: &RenderSpec) -> Result<String> {
    spec.validate()?;
    let values = series.values();
    if values.is_empty() {
        return Err(Error::EmptySeries);
    }
    let (w, h) = (spec.width as f64, spec.height as f64);
    let plot_w = (w - LEFT - RIGHT).max(1.0);
    let plot_h = (h - TOP - BOTTOM).max(1.0);
    let n = values.len();
    let x = |i: usize| {
        if n == 1 {
            LEFT + plot_w / 2.0
        } else {
            LEFT + plot_w * i as f64 / (n - 1) as f64
        }
    };
    let y = |v: f64| TOP + plot_h * (1.0 - v / 100.0);

    let mut svg = Svg::new(spec);
    svg.line(r##"<g class="axes" stroke="#999999" stroke-width="1">"##);
    for tick in [0.0, 25.0, 50.0, 75.0, 100.0] {
        svg.line(format!(
            r##"<line class="gridline" x1="{}" y1="{yy}" x2="{}" y2="{yy}" stroke="#dddddd"/>"##,
            px(LEFT),
            px(LEFT + plot_w),
            yy = px(y(tick))
        ));
        svg.line(format!(
            r##"<text x="{}" y="{}" font-size="11" text-anchor="end" stroke="none" fill="#333333">{tick}</text>"##,
            px(LEFT - 6.0),
            px(y(tick) + 4.0)
        ));
    }
    svg.line(format!(
        r##"<line x1="{l}" y1="{b}" x2="{r}" y2="{b}"/>"##,
        l = px(LEFT),
        r = px(LEFT + plot_w),
        b = px(TOP + plot_h)
    ));
    let ticks = X_TICKS.min(n);
    let mut last = usize::MAX;
    for k in 0..ticks {
        let i = if ticks == 1 {
            0
        } else {
            k * (n - 1) / (ticks - 1)
        };
        if i == last {
            continue;
        }
        last = i;
        svg.line(format!(
            r##"<text class="date" x="{}" y="{}" font-size="11" text-anchor="middle" stroke="none" fill="#333333">{}</text>"##,
            px(x(i)),
            px(TOP + plot_h + 18.0),
            series.grid().date(i).format("%Y-%m-%d")
        ));
    }
    svg.line(format!(
        r##"<text x="{}" y="{}" font-size="12" text-anchor="middle" stroke="none" fill="#333333" transform="rotate(-90 {x0} {y0})">Relative search volume</text>"##,
        px(14.0),
        px(TOP + plot_h / 2.0),
        x0 = px(14.0),
        y0 = px(TOP + plot_h / 2.0)
    ));
    svg.line("</g>");

    let points: Vec<String> = values
        .iter()
        .enumerate()
        .map(|(i, v)| format!("{},{}", px(x(i)), px(y(*v))))
        .collect();
    svg.line(format!(
        r##"<polyline class="series" data-geo="{}" fill="none" stroke="#b2182b" stroke-width="2" points="{}"/>"##,
        escape(series.geo()),
        points.join(" ")
    ));
    Ok(svg.finish())
}
