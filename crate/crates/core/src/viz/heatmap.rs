use super::{escape, legend, px, RenderSpec, Svg};
use crate::correlation::CorrelationMatrix;
use crate::error::Result;

/// N×N grid of coloured cells in label order, scale fixed to [-1, 1].
pub fn render_heatmap(m: &CorrelationMatrix, spec: &RenderSpec) -> Result<String> {
    spec.validate()?;
    m.validate()?;
    let n = m.len().max(1);
    let (w, h) = (spec.width as f64, spec.height as f64);
    let (left, top) = (48.0, 80.0);
    let legend_h = 40.0;
    let cell = ((w - left - 16.0) / n as f64)
        .min((h - top - legend_h - 16.0) / n as f64)
        .max(1.0);
    let font = (cell * 0.8).clamp(4.0, 11.0);

    let mut svg = Svg::new(spec);
    svg.line(r##"<g class="cells">"##);
    for i in 0..m.len() {
        for j in 0..m.len() {
            let rho = m.get(i, j);
            svg.line(format!(
                r##"<rect class="cell" x="{}" y="{}" width="{c}" height="{c}" fill="{}"><title>{} / {}: {rho:.4}</title></rect>"##,
                px(left + j as f64 * cell),
                px(top + i as f64 * cell),
                spec.color_map.sample((rho + 1.0) / 2.0),
                escape(&m.labels()[i]),
                escape(&m.labels()[j]),
                c = px(cell),
            ));
        }
    }
    svg.line("</g>");

    svg.line(format!(
        r##"<g class="labels" font-size="{}" fill="#333333">"##,
        px(font)
    ));
    for (k, label) in m.labels().iter().enumerate() {
        let mid = k as f64 * cell + cell / 2.0;
        svg.line(format!(
            r##"<text class="row-label" x="{}" y="{}" text-anchor="end" dominant-baseline="middle">{}</text>"##,
            px(left - 4.0),
            px(top + mid),
            escape(label)
        ));
        let (cx, cy) = (left + mid, top - 4.0);
        svg.line(format!(
            r##"<text class="col-label" x="{x}" y="{y}" transform="rotate(-90 {x} {y})" dominant-baseline="middle">{}</text>"##,
            escape(label),
            x = px(cx),
            y = px(cy)
        ));
    }
    svg.line("</g>");

    let grid_bottom = top + m.len() as f64 * cell;
    legend(
        &mut svg,
        spec.color_map,
        left,
        grid_bottom + 12.0,
        (m.len() as f64 * cell).clamp(120.0, 320.0),
        ["-1", "0", "1"],
    );
    Ok(svg.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::viz::ColorMap;

    fn cell_fills(svg: &str) -> Vec<String> {
        svg.lines()
            .filter(|l| l.contains(r##"class="cell""##))
            .map(|l| {
                let s = l.find("fill=\"").unwrap() + 6;
                l[s..s + 7].to_string()
            })
            .collect()
    }

    fn labels(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("L{i}")).collect()
    }

    #[test]
    fn identity_matrix() {
        let rows = (0..3)
            .map(|i| (0..3).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        let m = CorrelationMatrix::from_rows(labels(3), rows).unwrap();
        let svg = render_heatmap(&m, &RenderSpec::default()).unwrap();
        let fills = cell_fills(&svg);
        assert_eq!(fills.len(), 9);
        let top = ColorMap::Diverging.sample(1.0);
        let mid = ColorMap::Diverging.sample(0.5);
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(&fills[i * 3 + j], if i == j { &top } else { &mid });
            }
        }
        assert_eq!(svg.matches(r##"class="row-label""##).count(), 3);
        assert_eq!(svg.matches(r##"class="col-label""##).count(), 3);
    }

    #[test]
    fn negative_pair_is_symmetric() {
        let m = CorrelationMatrix::from_rows(
            labels(3),
            vec![
                vec![1.0, -0.95, 0.2],
                vec![-0.95, 1.0, 0.4],
                vec![0.2, 0.4, 1.0],
            ],
        )
        .unwrap();
        let fills = cell_fills(&render_heatmap(&m, &RenderSpec::default()).unwrap());
        assert_eq!(fills[1], fills[3]);
        assert_eq!(fills[1], ColorMap::Diverging.sample(0.025));
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(fills[i * 3 + j], fills[j * 3 + i]);
            }
        }
    }
}
