//! Write a small tree as DOT, GraphML and JSON, then read the JSON back.

use trendnet::viz::{export_graph, parse_graph_json, GraphFormat};
use trendnet::{Edge, SpanningTree};

fn main() -> trendnet::Result<()> {
    let nodes = ["DE", "FR", "IT", "US"].map(String::from).to_vec();
    let tree = SpanningTree::new(
        nodes,
        vec![
            Edge::new(0, 1, 0.96),
            Edge::new(1, 2, 0.93),
            Edge::new(1, 3, 0.85),
        ],
    )?;
    for format in GraphFormat::ALL {
        println!("--- {}", format.extension());
        print!("{}", export_graph(&tree, format));
    }
    let (nodes, edges) = parse_graph_json(&export_graph(&tree, GraphFormat::Json))?;
    assert_eq!(SpanningTree::new(nodes, edges)?, tree);
    println!("--- json round trip ok");
    Ok(())
}
