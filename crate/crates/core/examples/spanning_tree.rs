//! Maximum spanning tree of a small correlation matrix, its degree
//! centrality and the branches left after removing the hub.

use trendnet::{
    degree_centrality, extract_branches, graph_from_matrix, maximum_spanning_tree,
    CorrelationMatrix, GraphView,
};

fn main() -> trendnet::Result<()> {
    let labels = ["CN", "HK", "IT", "ES", "FR", "US", "CA"]
        .map(String::from)
        .to_vec();
    let rows = vec![
        vec![1.00, 0.92, 0.30, 0.28, 0.31, 0.25, 0.27],
        vec![0.92, 1.00, 0.35, 0.33, 0.34, 0.30, 0.29],
        vec![0.30, 0.35, 1.00, 0.95, 0.93, 0.80, 0.78],
        vec![0.28, 0.33, 0.95, 1.00, 0.96, 0.82, 0.81],
        vec![0.31, 0.34, 0.93, 0.96, 1.00, 0.85, 0.83],
        vec![0.25, 0.30, 0.80, 0.82, 0.85, 1.00, 0.97],
        vec![0.27, 0.29, 0.78, 0.81, 0.83, 0.97, 1.00],
    ];
    let m = CorrelationMatrix::from_rows(labels, rows)?;
    let tree = maximum_spanning_tree(&graph_from_matrix(&m)?)?;

    println!(
        "{} edges, total weight {:.2}",
        tree.edge_count(),
        tree.total_weight()
    );
    for e in tree.edges() {
        println!(
            "  {} - {}  {:.2}",
            tree.nodes()[e.source],
            tree.nodes()[e.target],
            e.weight
        );
    }

    let c = degree_centrality(&tree);
    for n in &c.nodes {
        println!("{:>3} degree {} ({:.3})", n.geo, n.degree, n.normalized);
    }

    let parts = extract_branches(&tree);
    println!("hub {} (degree {})", parts.hub, parts.hub_degree);
    for b in &parts.branches {
        println!("  via {}: {:?}", b.anchor, b.members);
    }
    Ok(())
}
