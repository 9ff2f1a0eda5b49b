use super::{escape, force_layout, px, RenderSpec, Svg};
use crate::error::{Error, Result};
use crate::graph::{CentralityReport, GraphView, SpanningTree};

const MARGIN: f64 = 40.0;
const MIN_RADIUS: f64 = 4.0;
const RADIUS_RANGE: f64 = 12.0;

/// Node radius grows strictly with degree.
fn radius(degree: usize, max_degree: usize) -> f64 {
    MIN_RADIUS + RADIUS_RANGE * (degree as f64 / max_degree.max(1) as f64).sqrt()
}

/// Spanning tree drawn with a seeded force layout, nodes sized by degree.
pub fn render_tree(t: &SpanningTree, c: &CentralityReport, spec: &RenderSpec) -> Result<String> {
    spec.validate()?;
    if !t.nodes().iter().map(String::as_str).eq(c.labels()) {
        return Err(Error::LabelMismatch(
            "centrality report does not describe this tree".into(),
        ));
    }
    let edges: Vec<(usize, usize)> = t.edges().iter().map(|e| (e.source, e.target)).collect();
    let layout = force_layout(t.node_count(), &edges, spec.seed);
    let (w, h) = (spec.width as f64, spec.height as f64);
    let top = if spec.title.is_empty() {
        MARGIN
    } else {
        MARGIN + 24.0
    };
    let place = |(x, y): (f64, f64)| {
        (
            MARGIN + x * (w - 2.0 * MARGIN).max(1.0),
            top + y * (h - top - MARGIN).max(1.0),
        )
    };
    let pts: Vec<(f64, f64)> = layout.into_iter().map(place).collect();
    let max_degree = c.nodes.iter().map(|n| n.degree).max().unwrap_or(1);

    let mut svg = Svg::new(spec);
    svg.line(r##"<g class="edges" stroke="#888888">"##);
    for e in t.edges() {
        let (a, b) = (pts[e.source], pts[e.target]);
        svg.line(format!(
            r##"<line class="edge" x1="{}" y1="{}" x2="{}" y2="{}" stroke-width="{}"><title>{} – {}: {:.4}</title></line>"##,
            px(a.0),
            px(a.1),
            px(b.0),
            px(b.1),
            px(0.5 + 2.0 * e.weight.clamp(0.0, 1.0)),
            escape(&t.nodes()[e.source]),
            escape(&t.nodes()[e.target]),
            e.weight
        ));
    }
    svg.line("</g>");
    svg.line(r##"<g class="nodes">"##);
    for (k, node) in c.nodes.iter().enumerate() {
        let (x, y) = pts[k];
        let r = radius(node.degree, max_degree);
        svg.line(format!(
            r##"<circle class="node" data-geo="{g}" data-degree="{}" cx="{}" cy="{}" r="{}" fill="{}" stroke="#333333"/>"##,
            node.degree,
            px(x),
            px(y),
            px(r),
            spec.color_map.sample(0.5 + 0.5 * node.normalized.sqrt()),
            g = escape(&node.geo),
        ));
        svg.line(format!(
            r##"<text class="label" x="{}" y="{}" font-size="10" text-anchor="middle">{}</text>"##,
            px(x),
            px(y - r - 2.0),
            escape(&node.geo)
        ));
    }
    svg.line("</g>");
    Ok(svg.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{degree_centrality, Edge};

    fn tree(names: &[&str], edges: &[(usize, usize)]) -> SpanningTree {
        SpanningTree::new(
            names.iter().map(|s| s.to_string()).collect(),
            edges.iter().map(|&(a, b)| Edge::new(a, b, 0.7)).collect(),
        )
        .unwrap()
    }

    fn radii(svg: &str) -> Vec<(String, f64)> {
        svg.lines()
            .filter(|l| l.contains(r##"class="node""##))
            .map(|l| {
                let attr = |name: &str| {
                    let s = l.find(&format!("{name}=\"")).unwrap() + name.len() + 2;
                    l[s..s + l[s..].find('"').unwrap()].to_string()
                };
                (attr("data-geo"), attr("r").parse().unwrap())
            })
            .collect()
    }

    #[test]
    fn star_hub_is_largest() {
        let t = tree(
            &["H", "A", "B", "C", "D"],
            &[(0, 1), (0, 2), (0, 3), (0, 4)],
        );
        let svg = render_tree(&t, &degree_centrality(&t), &RenderSpec::default()).unwrap();
        let r = radii(&svg);
        assert_eq!(r[0].0, "H");
        assert!(r[1..].iter().all(|(_, rr)| *rr < r[0].1));
        assert_eq!(svg.matches(r##"class="edge""##).count(), 4);
    }

    #[test]
    fn path_of_three() {
        let t = tree(&["A", "B", "C"], &[(0, 1), (1, 2)]);
        let spec = RenderSpec::default();
        let svg = render_tree(&t, &degree_centrality(&t), &spec).unwrap();
        assert_eq!(svg.matches(r##"class="edge""##).count(), 2);
        let r = radii(&svg);
        assert!(r[1].1 > r[0].1 && r[1].1 > r[2].1);
        assert_eq!(svg, render_tree(&t, &degree_centrality(&t), &spec).unwrap());
    }

    #[test]
    fn mismatched_report() {
        let t = tree(&["A", "B", "C"], &[(0, 1), (1, 2)]);
        let other = tree(&["A", "B", "D"], &[(0, 1), (1, 2)]);
        assert!(matches!(
            render_tree(&t, &degree_centrality(&other), &RenderSpec::default()),
            Err(Error::LabelMismatch(_))
        ));
    }

    #[test]
    fn radius_is_strictly_monotone() {
        for max in 1..20 {
            for d in 1..max {
                assert!(radius(d, max) < radius(d + 1, max));
            }
        }
    }
}
