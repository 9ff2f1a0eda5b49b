use std::collections::HashMap;
use std::fmt::Write as _;
use std::str::FromStr;

use serde::Deserialize;

use super::escape;
use crate::error::{Error, Result};
use crate::graph::{Edge, GraphView};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GraphFormat {
    Dot,
    Graphml,
    Json,
}

impl GraphFormat {
    pub const ALL: [GraphFormat; 3] = [GraphFormat::Dot, GraphFormat::Graphml, GraphFormat::Json];

    pub fn extension(self) -> &'static str {
        match self {
            GraphFormat::Dot => "dot",
            GraphFormat::Graphml => "graphml",
            GraphFormat::Json => "json",
        }
    }
}

impl FromStr for GraphFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "dot" => Ok(GraphFormat::Dot),
            "graphml" => Ok(GraphFormat::Graphml),
            "json" => Ok(GraphFormat::Json),
            _ => Err(Error::UnsupportedFormat(s.to_owned())),
        }
    }
}

/// 17 significant digits: enough to round-trip any f64.
fn weight(w: f64) -> String {
    format!("{w:.16e}")
}

fn dot_id(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

pub fn export_graph(g: &impl GraphView, format: GraphFormat) -> String {
    let nodes = g.nodes();
    let mut out = String::new();
    match format {
        GraphFormat::Dot => {
            out.push_str("graph correlation {\n");
            for n in nodes {
                writeln!(out, "  {};", dot_id(n)).unwrap();
            }
            for e in g.edges() {
                writeln!(
                    out,
                    "  {} -- {} [weight={}];",
                    dot_id(&nodes[e.source]),
                    dot_id(&nodes[e.target]),
                    weight(e.weight)
                )
                .unwrap();
            }
            out.push_str("}\n");
        }
        GraphFormat::Graphml => {
            out.push_str(concat!(
                "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n",
                "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\" ",
                "xmlns:xsi=\"http://www.w3.org/2001/XMLSchema-instance\" ",
                "xsi:schemaLocation=\"http://graphml.graphdrawing.org/xmlns ",
                "http://graphml.graphdrawing.org/xmlns/1.0/graphml.xsd\">\n",
                "  <key id=\"weight\" for=\"edge\" attr.name=\"weight\" attr.type=\"double\"/>\n",
                "  <graph id=\"correlation\" edgedefault=\"undirected\">\n",
            ));
            for n in nodes {
                writeln!(out, "    <node id=\"{}\"/>", escape(n)).unwrap();
            }
            for (k, e) in g.edges().iter().enumerate() {
                writeln!(
                    out,
                    "    <edge id=\"e{k}\" source=\"{}\" target=\"{}\"><data key=\"weight\">{}</data></edge>",
                    escape(&nodes[e.source]),
                    escape(&nodes[e.target]),
                    weight(e.weight)
                )
                .unwrap();
            }
            out.push_str("  </graph>\n</graphml>\n");
        }
        GraphFormat::Json => {
            let q = |s: &str| serde_json::to_string(s).expect("strings serialize");
            out.push_str("{\n  \"nodes\": [");
            for (k, n) in nodes.iter().enumerate() {
                out.push_str(if k == 0 { "" } else { ", " });
                out.push_str(&q(n));
            }
            out.push_str("],\n  \"edges\": [");
            for (k, e) in g.edges().iter().enumerate() {
                write!(
                    out,
                    "{}\n    {{\"source\": {}, \"target\": {}, \"weight\": {}}}",
                    if k == 0 { "" } else { "," },
                    q(&nodes[e.source]),
                    q(&nodes[e.target]),
                    weight(e.weight)
                )
                .unwrap();
            }
            if !g.edges().is_empty() {
                out.push_str("\n  ");
            }
            out.push_str("]\n}\n");
        }
    }
    out
}

#[derive(Deserialize)]
struct JsonGraph {
    nodes: Vec<String>,
    edges: Vec<JsonEdge>,
}

#[derive(Deserialize)]
struct JsonEdge {
    source: String,
    target: String,
    weight: f64,
}

/// Read back the JSON export as node labels and index-based edges.
pub fn parse_graph_json(text: &str) -> Result<(Vec<String>, Vec<Edge>)> {
    let g: JsonGraph = serde_json::from_str(text)?;
    let index: HashMap<&str, usize> = g
        .nodes
        .iter()
        .enumerate()
        .map(|(i, n)| (n.as_str(), i))
        .collect();
    let lookup = |name: &str| {
        index
            .get(name)
            .copied()
            .ok_or_else(|| Error::LabelMismatch(format!("edge refers to unknown node `{name}`")))
    };
    let edges = g
        .edges
        .iter()
        .map(|e| Ok(Edge::new(lookup(&e.source)?, lookup(&e.target)?, e.weight)))
        .collect::<Result<Vec<_>>>()?;
    Ok((g.nodes, edges))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{SpanningTree, WeightedGraph};

    fn two_node_tree() -> SpanningTree {
        SpanningTree::new(vec!["A".into(), "B".into()], vec![Edge::new(0, 1, 0.9)]).unwrap()
    }

    #[test]
    fn dot_has_one_edge_line() {
        let dot = export_graph(&two_node_tree(), GraphFormat::Dot);
        assert_eq!(dot.matches(" -- ").count(), 1);
        assert!(dot.contains("\"A\" -- \"B\" [weight=9.0000000000000002e-1];"));
        assert!(dot.starts_with("graph "));
    }

    #[test]
    fn graphml_declares_weight_key() {
        let xml = export_graph(&two_node_tree(), GraphFormat::Graphml);
        assert!(xml
            .contains(r##"<key id="weight" for="edge" attr.name="weight" attr.type="double"/>"##));
        assert!(xml.contains(r##"edgedefault="undirected""##));
        assert_eq!(xml.matches("<edge ").count(), 1);
        assert_eq!(xml.matches("<node ").count(), 2);
    }

    #[test]
    fn json_round_trip_is_exact() {
        let g = WeightedGraph::new(
            vec!["A".into(), "B \"q\"".into(), "C".into()],
            vec![
                Edge::new(0, 1, 0.1 + 0.2),
                Edge::new(0, 2, -1.0 / 3.0),
                Edge::new(1, 2, 5e-324),
            ],
        )
        .unwrap();
        let text = export_graph(&g, GraphFormat::Json);
        let (nodes, edges) = parse_graph_json(&text).unwrap();
        assert_eq!(WeightedGraph::new(nodes, edges).unwrap(), g);
    }

    #[test]
    fn json_weights_round_trip_bitwise() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let mut w: Vec<f64> = (0..5000).map(|_| rng.gen_range(-1.0..1.0)).collect();
        w.push(0.994_074_722_515_355_1);
        let nodes: Vec<String> = (0..=w.len()).map(|i| format!("n{i}")).collect();
        let edges = w
            .iter()
            .enumerate()
            .map(|(i, &x)| Edge::new(i, i + 1, x))
            .collect();
        let g = WeightedGraph::new(nodes, edges).unwrap();
        let (_, back) = parse_graph_json(&export_graph(&g, GraphFormat::Json)).unwrap();
        for (a, b) in g.edges().iter().zip(&back) {
            assert_eq!(a.weight.to_bits(), b.weight.to_bits(), "{}", a.weight);
        }
    }

    #[test]
    fn unknown_format() {
        assert!(
            matches!("png".parse::<GraphFormat>(), Err(Error::UnsupportedFormat(f)) if f == "png")
        );
        assert_eq!(
            "GraphML".parse::<GraphFormat>().unwrap(),
            GraphFormat::Graphml
        );
    }
}
