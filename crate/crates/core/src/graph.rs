//! Correlation graphs, maximum spanning trees and tree summaries.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashSet};

use serde::{Deserialize, Serialize};

use crate::correlation::CorrelationMatrix;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    /// Node index, always smaller than `target`.
    pub source: usize,
    pub target: usize,
    pub weight: f64,
}

impl Edge {
    /// Edge between `a` and `b` with endpoints stored in ascending order.
    pub fn new(a: usize, b: usize, weight: f64) -> Self {
        Edge {
            source: a.min(b),
            target: a.max(b),
            weight,
        }
    }
}

/// Anything with labeled nodes and weighted undirected edges.
pub trait GraphView {
    fn nodes(&self) -> &[String];
    fn edges(&self) -> &[Edge];
}

fn check_nodes_and_edges(nodes: &[String], edges: &[Edge]) -> Result<()> {
    let mut seen = HashSet::new();
    if let Some(dup) = nodes.iter().find(|n| !seen.insert(n.as_str())) {
        return Err(Error::DuplicateLocation(dup.clone()));
    }
    let mut pairs = HashSet::new();
    for e in edges {
        if e.source >= e.target || e.target >= nodes.len() {
            return Err(Error::InvalidTree(format!(
                "edge ({}, {}) is a self-loop or out of range",
                e.source, e.target
            )));
        }
        if !e.weight.is_finite() {
            return Err(Error::InvalidValue(format!(
                "edge ({}, {}) has weight {}",
                nodes[e.source], nodes[e.target], e.weight
            )));
        }
        if !pairs.insert((e.source, e.target)) {
            return Err(Error::InvalidTree(format!(
                "edge ({}, {}) appears twice",
                nodes[e.source], nodes[e.target]
            )));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph {
    nodes: Vec<String>,
    edges: Vec<Edge>,
}

impl WeightedGraph {
    pub fn new(nodes: Vec<String>, edges: Vec<Edge>) -> Result<Self> {
        let edges: Vec<Edge> = edges
            .into_iter()
            .map(|e| Edge::new(e.source, e.target, e.weight))
            .collect();
        check_nodes_and_edges(&nodes, &edges)?;
        Ok(WeightedGraph { nodes, edges })
    }
}

impl GraphView for WeightedGraph {
    fn nodes(&self) -> &[String] {
        &self.nodes
    }

    fn edges(&self) -> &[Edge] {
        &self.edges
    }
}

/// Complete graph over the matrix labels, one edge per unordered pair.
/// Negative correlations are kept as negative weights.
pub fn graph_from_matrix(m: &CorrelationMatrix) -> Result<WeightedGraph> {
    m.validate()?;
    let n = m.len();
    if n < 2 {
        return Err(Error::InvalidMatrix(format!(
            "{n} label(s); need at least 2"
        )));
    }
    let mut edges = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            edges.push(Edge::new(i, j, m.get(i, j)));
        }
    }
    WeightedGraph::new(m.labels().to_vec(), edges)
}

/// Disjoint-set forest with path halving and union by size.
#[derive(Debug, Clone)]
pub struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
    components: usize,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            size: vec![1; n],
            components: n,
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Merge the sets of `a` and `b`; false if they were already joined.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
        self.components -= 1;
        true
    }

    pub fn components(&self) -> usize {
        self.components
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpanningTree {
    nodes: Vec<String>,
    edges: Vec<Edge>,
    total_weight: f64,
}

impl SpanningTree {
    /// Validate that `edges` form a spanning tree over `nodes`.
    pub fn new(nodes: Vec<String>, edges: Vec<Edge>) -> Result<Self> {
        let mut edges: Vec<Edge> = edges
            .into_iter()
            .map(|e| Edge::new(e.source, e.target, e.weight))
            .collect();
        check_nodes_and_edges(&nodes, &edges)?;
        let n = nodes.len();
        if n < 2 || edges.len() != n - 1 {
            return Err(Error::InvalidTree(format!(
                "{} edges for {n} nodes",
                edges.len()
            )));
        }
        let mut uf = UnionFind::new(n);
        for e in &edges {
            if !uf.union(e.source, e.target) {
                return Err(Error::InvalidTree(format!(
                    "edge ({}, {}) closes a cycle",
                    nodes[e.source], nodes[e.target]
                )));
            }
        }
        edges.sort_by_key(|e| (e.source, e.target));
        let total_weight = edges.iter().map(|e| e.weight).sum();
        Ok(SpanningTree {
            nodes,
            edges,
            total_weight,
        })
    }

    pub fn total_weight(&self) -> f64 {
        self.total_weight
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Always `node_count() - 1`.
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.nodes.len()];
        for e in &self.edges {
            deg[e.source] += 1;
            deg[e.target] += 1;
        }
        deg
    }

    pub fn neighbors(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.nodes.len()];
        for e in &self.edges {
            adj[e.source].push(e.target);
            adj[e.target].push(e.source);
        }
        adj
    }
}

impl GraphView for SpanningTree {
    fn nodes(&self) -> &[String] {
        &self.nodes
    }

    fn edges(&self) -> &[Edge] {
        &self.edges
    }
}

/// Order for Kruskal: heavier first, then by the endpoint labels so equal
/// weights are resolved the same way whatever order the edges arrive in.
fn edge_order(nodes: &[String], a: &Edge, b: &Edge) -> Ordering {
    let key = |e: &Edge| {
        let (x, y) = (&nodes[e.source], &nodes[e.target]);
        if x <= y {
            (x, y)
        } else {
            (y, x)
        }
    };
    b.weight
        .total_cmp(&a.weight)
        .then_with(|| key(a).cmp(&key(b)))
}

/// Spanning tree of maximum total weight (Kruskal on descending weights).
pub fn maximum_spanning_tree(g: &impl GraphView) -> Result<SpanningTree> {
    let nodes = g.nodes();
    if nodes.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "a spanning tree needs at least 2 nodes, got {}",
            nodes.len()
        )));
    }
    let mut edges = g.edges().to_vec();
    edges.sort_by(|a, b| edge_order(nodes, a, b));

    let mut uf = UnionFind::new(nodes.len());
    let mut chosen = Vec::with_capacity(nodes.len() - 1);
    for e in edges {
        if uf.union(e.source, e.target) {
            chosen.push(e);
            if chosen.len() == nodes.len() - 1 {
                break;
            }
        }
    }
    if uf.components() != 1 {
        return Err(Error::Disconnected);
    }
    SpanningTree::new(nodes.to_vec(), chosen)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeCentrality {
    pub geo: String,
    pub degree: usize,
    /// `degree / (N - 1)`.
    pub normalized: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CentralityReport {
    pub nodes: Vec<NodeCentrality>,
}

impl CentralityReport {
    pub fn get(&self, geo: &str) -> Option<&NodeCentrality> {
        self.nodes.iter().find(|n| n.geo == geo)
    }

    pub fn degree(&self, geo: &str) -> Option<usize> {
        self.get(geo).map(|n| n.degree)
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.nodes.iter().map(|n| n.geo.as_str())
    }
}

/// Degree of every node within the tree, in node order.
pub fn degree_centrality(t: &SpanningTree) -> CentralityReport {
    let denom = (t.node_count() - 1) as f64;
    let nodes = t
        .nodes
        .iter()
        .zip(t.degrees())
        .map(|(geo, degree)| NodeCentrality {
            geo: geo.clone(),
            degree,
            normalized: degree as f64 / denom,
        })
        .collect();
    CentralityReport { nodes }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Branch {
    /// The hub's neighbour through which this branch attaches.
    pub anchor: String,
    /// Sorted lexicographically.
    pub members: Vec<String>,
}

impl Branch {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchPartition {
    pub hub: String,
    pub hub_degree: usize,
    /// Largest first; equal sizes ordered by smallest member.
    pub branches: Vec<Branch>,
}

/// Split the tree at its highest-degree node.
///
/// The hub is the maximum-degree node (ties go to the lexicographically
/// smallest label); each branch is one component left after removing it.
pub fn extract_branches(t: &SpanningTree) -> BranchPartition {
    let degrees = t.degrees();
    let hub = (0..t.node_count())
        .max_by(|&a, &b| {
            degrees[a]
                .cmp(&degrees[b])
                .then_with(|| t.nodes[b].cmp(&t.nodes[a]))
        })
        .expect("tree has nodes");
    let adj = t.neighbors();

    let mut branches = Vec::with_capacity(adj[hub].len());
    for &anchor in &adj[hub] {
        let mut members = BTreeSet::new();
        let mut stack = vec![anchor];
        let mut visited = vec![false; t.node_count()];
        visited[hub] = true;
        visited[anchor] = true;
        while let Some(v) = stack.pop() {
            members.insert(t.nodes[v].clone());
            for &w in &adj[v] {
                if !visited[w] {
                    visited[w] = true;
                    stack.push(w);
                }
            }
        }
        branches.push(Branch {
            anchor: t.nodes[anchor].clone(),
            members: members.into_iter().collect(),
        });
    }
    branches.sort_by(|a, b| {
        b.len()
            .cmp(&a.len())
            .then_with(|| a.members[0].cmp(&b.members[0]))
    });

    BranchPartition {
        hub: t.nodes[hub].clone(),
        hub_degree: degrees[hub],
        branches,
    }
}
