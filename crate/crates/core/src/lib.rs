//! Correlation networks over search-interest time series.
//!
//! Per-location relative search volume series are aligned into a [`Panel`],
//! trimmed to the onset of activity in a worldwide reference series,
//! correlated pairwise with
//! tie-aware Spearman rho, turned into a complete weighted graph and reduced
//! to its maximum spanning tree. The tree is summarised by degree
//! centrality and by the branches hanging off its most connected node, and
//! every stage can be rendered to SVG or exported as DOT, GraphML or JSON.
//!
//! ```no_run
//! use trendnet::{pipeline, PipelineConfig};
//!
//! let config = PipelineConfig::new("fixtures/coronavirus/manifest.json", "out");
//! let artifacts = pipeline::run_pipeline(&config).unwrap();
//! println!("wrote {} files", artifacts.files.len());
//! ```

pub mod correlation;
pub mod error;
pub mod graph;
pub mod ingestion;
pub mod pipeline;
pub mod timeseries;
pub mod viz;

pub use correlation::{
    average_ranks, correlation_matrix, spearman_rho, ConstantPolicy, CorrelationMatrix,
};
pub use error::{Error, Result};
pub use graph::{
    degree_centrality, extract_branches, graph_from_matrix, maximum_spanning_tree, BranchPartition,
    CentralityReport, Edge, GraphView, SpanningTree, WeightedGraph,
};
pub use pipeline::PipelineConfig;

pub use timeseries::{
    align_panel, normalize_rsv, trim_to_onset, DateGrid, LocationSeries, Panel, Step,
};
