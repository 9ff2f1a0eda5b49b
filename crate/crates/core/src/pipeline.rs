//! End-to-end runs and the individual stages they are built from.
//!
//! Each stage writes its artifacts under an output directory and returns
//! the in-memory result. [`run_pipeline`] chains the stages directly; the
//! `trendnet` binary runs them one at a time through files, and both paths
//! produce the same bytes.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::json;
use sha2::{Digest, Sha256};

use crate::correlation::{correlation_matrix, ConstantPolicy, CorrelationMatrix};
use crate::error::{Error, Result};
use crate::graph::{
    degree_centrality, extract_branches, graph_from_matrix, maximum_spanning_tree, BranchPartition,
    CentralityReport, SpanningTree, WeightedGraph,
};
use crate::ingestion::{load_dataset, DatasetManifest, RegionSnapshot};
use crate::timeseries::{trim_to_onset, LocationSeries, Panel};
use crate::viz::{
    export_graph, parse_graph_json, render_choropleth_frames, render_heatmap, render_line_chart,
    render_tree, ColorMap, GraphFormat, RenderSpec,
};

pub const PANEL_FILE: &str = "panel.json";
pub const REFERENCE_FILE: &str = "reference.json";
pub const SNAPSHOTS_FILE: &str = "snapshots.json";
pub const MATRIX_CSV: &str = "correlation.csv";
pub const MATRIX_JSON: &str = "correlation.json";
pub const CENTRALITY_FILE: &str = "centrality.json";
pub const BRANCHES_FILE: &str = "branches.json";
pub const METADATA_FILE: &str = "run_metadata.json";
pub const FAILURE_MARKER: &str = "FAILED";
pub const FIGURES_DIR: &str = "figures";

pub const DEFAULT_SEED: u64 = 42;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub manifest: PathBuf,
    pub out_dir: PathBuf,
    /// Overrides the manifest's threshold when set.
    pub onset_threshold: Option<f64>,
    pub constant_policy: ConstantPolicy,
    /// Extra graph/tree export formats; `tree.json` is always written.
    #[serde(skip)]
    pub graph_formats: Vec<GraphFormat>,
    pub render: bool,
    pub seed: u64,
}

impl PipelineConfig {
    pub fn new(manifest: impl Into<PathBuf>, out_dir: impl Into<PathBuf>) -> Self {
        PipelineConfig {
            manifest: manifest.into(),
            out_dir: out_dir.into(),
            onset_threshold: None,
            constant_policy: ConstantPolicy::Error,
            graph_formats: GraphFormat::ALL.to_vec(),
            render: true,
            seed: DEFAULT_SEED,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    Ingest,
    Correlate,
    Tree,
    Centrality,
    Branches,
    Render,
    Metadata,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Stage::Ingest => "ingest",
            Stage::Correlate => "correlate",
            Stage::Tree => "tree",
            Stage::Centrality => "centrality",
            Stage::Branches => "branches",
            Stage::Render => "render",
            Stage::Metadata => "metadata",
        };
        f.write_str(name)
    }
}

#[derive(Debug, thiserror::Error)]
#[error("stage `{stage}` failed: {source}")]
pub struct PipelineError {
    pub stage: Stage,
    #[source]
    pub source: Error,
}

trait StageContext<T> {
    fn stage(self, stage: Stage) -> std::result::Result<T, PipelineError>;
}

impl<T> StageContext<T> for Result<T> {
    fn stage(self, stage: Stage) -> std::result::Result<T, PipelineError> {
        self.map_err(|source| PipelineError { stage, source })
    }
}

/// Collects written files relative to the output directory.
#[derive(Debug)]
pub struct ArtifactWriter {
    root: PathBuf,
    written: Vec<PathBuf>,
}

impl ArtifactWriter {
    pub fn new(root: impl Into<PathBuf>) -> Result<Self> {
        let root = root.into();
        fs::create_dir_all(&root).map_err(|e| Error::from(e).in_file(&root))?;
        Ok(ArtifactWriter {
            root,
            written: Vec::new(),
        })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn write(&mut self, rel: impl AsRef<Path>, contents: impl AsRef<[u8]>) -> Result<()> {
        let rel = rel.as_ref();
        let path = self.root.join(rel);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent).map_err(|e| Error::from(e).in_file(parent))?;
        }
        fs::write(&path, contents).map_err(|e| Error::from(e).in_file(&path))?;
        self.written.push(rel.to_path_buf());
        Ok(())
    }

    pub fn written(&self) -> &[PathBuf] {
        &self.written
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("artifact serializes");
    s.push('\n');
    s
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::from(e).in_file(path))
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    serde_json::from_str(&read_text(path)?).map_err(|e| Error::from(e).in_file(path))
}

pub fn read_panel(path: &Path) -> Result<Panel> {
    read_json(path)
}

pub fn read_series(path: &Path) -> Result<LocationSeries> {
    read_json(path)
}

pub fn read_snapshots(path: &Path) -> Result<Vec<RegionSnapshot>> {
    read_json(path)
}

pub fn read_centrality(path: &Path) -> Result<CentralityReport> {
    read_json(path)
}

/// Matrix from `.json` or `.csv`, chosen by extension.
pub fn read_matrix(path: &Path) -> Result<CorrelationMatrix> {
    let text = read_text(path)?;
    let parsed = match path.extension().and_then(|e| e.to_str()) {
        Some("csv") => CorrelationMatrix::from_csv(&text),
        _ => CorrelationMatrix::from_json(&text),
    };
    parsed.map_err(|e| e.in_file(path))
}

/// Tree from its JSON graph export.
pub fn read_tree(path: &Path) -> Result<SpanningTree> {
    parse_graph_json(&read_text(path)?)
        .and_then(|(nodes, edges)| SpanningTree::new(nodes, edges))
        .map_err(|e| e.in_file(path))
}

pub fn read_graph(path: &Path) -> Result<WeightedGraph> {
    parse_graph_json(&read_text(path)?)
        .and_then(|(nodes, edges)| WeightedGraph::new(nodes, edges))
        .map_err(|e| e.in_file(path))
}

#[derive(Debug, Clone, PartialEq)]
pub struct IngestOutput {
    /// Trimmed to the reference onset when a reference is present.
    pub panel: Panel,
    /// Full normalized reference series (untrimmed).
    pub reference: Option<LocationSeries>,
    pub snapshots: Vec<RegionSnapshot>,
    pub warnings: Vec<String>,
}

/// Load the manifest dataset and trim it to the reference onset.
pub fn stage_ingest(
    manifest: &DatasetManifest,
    onset_threshold: Option<f64>,
    out: &mut ArtifactWriter,
) -> Result<IngestOutput> {
    let dataset = load_dataset(manifest)?;
    let threshold = onset_threshold.unwrap_or(manifest.onset_threshold);
    let panel = match &dataset.reference {
        Some(reference) => trim_to_onset(&dataset.panel, reference, threshold)?,
        None => dataset.panel,
    };
    out.write(PANEL_FILE, to_json(&panel))?;
    if let Some(reference) = &dataset.reference {
        out.write(REFERENCE_FILE, to_json(reference))?;
    }
    out.write(SNAPSHOTS_FILE, to_json(&dataset.snapshots))?;
    Ok(IngestOutput {
        panel,
        reference: dataset.reference,
        snapshots: dataset.snapshots,
        warnings: dataset.warnings,
    })
}

pub fn stage_correlate(
    panel: &Panel,
    policy: ConstantPolicy,
    out: &mut ArtifactWriter,
) -> Result<CorrelationMatrix> {
    let m = correlation_matrix(panel, policy)?;
    out.write(MATRIX_CSV, m.to_csv())?;
    out.write(MATRIX_JSON, m.to_json() + "\n")?;
    Ok(m)
}

/// Complete graph and maximum spanning tree exports.
pub fn stage_tree(
    m: &CorrelationMatrix,
    formats: &[GraphFormat],
    out: &mut ArtifactWriter,
) -> Result<SpanningTree> {
    let graph = graph_from_matrix(m)?;
    let tree = maximum_spanning_tree(&graph)?;
    let mut formats = formats.to_vec();
    if !formats.contains(&GraphFormat::Json) {
        formats.push(GraphFormat::Json);
    }
    for f in GraphFormat::ALL.into_iter().filter(|f| formats.contains(f)) {
        out.write(format!("graph.{}", f.extension()), export_graph(&graph, f))?;
        out.write(format!("tree.{}", f.extension()), export_graph(&tree, f))?;
    }
    Ok(tree)
}

pub fn stage_centrality(tree: &SpanningTree, out: &mut ArtifactWriter) -> Result<CentralityReport> {
    let report = degree_centrality(tree);
    out.write(CENTRALITY_FILE, to_json(&report))?;
    Ok(report)
}

pub fn stage_branches(tree: &SpanningTree, out: &mut ArtifactWriter) -> Result<BranchPartition> {
    let branches = extract_branches(tree);
    out.write(BRANCHES_FILE, to_json(&branches))?;
    Ok(branches)
}

/// Whatever figure inputs are available; missing ones are skipped.
#[derive(Debug, Default, Clone, Copy)]
pub struct RenderInputs<'a> {
    pub keyword: Option<&'a str>,
    pub reference: Option<&'a LocationSeries>,
    pub matrix: Option<&'a CorrelationMatrix>,
    pub tree: Option<(&'a SpanningTree, &'a CentralityReport)>,
    pub snapshots: &'a [RegionSnapshot],
}

/// Returns warnings raised while drawing choropleth frames.
pub fn stage_render(
    inputs: RenderInputs<'_>,
    seed: u64,
    out: &mut ArtifactWriter,
) -> Result<Vec<String>> {
    let kw = inputs
        .keyword
        .map(|k| format!(" for \u{201c}{k}\u{201d}"))
        .unwrap_or_default();
    let fig = Path::new(FIGURES_DIR);
    if let Some(reference) = inputs.reference {
        let spec = RenderSpec::titled(format!("Global search activity{kw}")).with_seed(seed);
        out.write(
            fig.join("global_trend.svg"),
            render_line_chart(reference, &spec)?,
        )?;
    }
    if let Some(m) = inputs.matrix {
        let spec = RenderSpec::titled(format!(
            "Spearman correlations between {} locations",
            m.len()
        ))
        .with_size(960, 1040)
        .with_seed(seed);
        out.write(fig.join("heatmap.svg"), render_heatmap(m, &spec)?)?;
    }
    if let Some((tree, centrality)) = inputs.tree {
        let spec = RenderSpec::titled("Maximum spanning tree of correlations")
            .with_size(960, 960)
            .with_seed(seed);
        out.write(fig.join("tree.svg"), render_tree(tree, centrality, &spec)?)?;
    }
    let mut warnings = Vec::new();
    if !inputs.snapshots.is_empty() {
        let spec = RenderSpec::titled(format!("Search activity by country{kw}"))
            .with_color_map(ColorMap::Sequential)
            .with_seed(seed);
        let frames = render_choropleth_frames(inputs.snapshots, &spec)?;
        for (k, frame) in frames.into_iter().enumerate() {
            out.write(
                fig.join("choropleth").join(format!("frame_{k:03}.svg")),
                frame.svg,
            )?;
            warnings.extend(frame.warnings);
        }
    }
    Ok(warnings)
}

#[derive(Debug, Clone)]
pub struct RunArtifacts {
    pub out_dir: PathBuf,
    /// Relative to `out_dir`, in write order; ends with the metadata file.
    pub files: Vec<PathBuf>,
    pub panel: Panel,
    pub matrix: CorrelationMatrix,
    pub tree: SpanningTree,
    pub centrality: CentralityReport,
    pub branches: BranchPartition,
    pub warnings: Vec<String>,
}

fn sha256_file(path: &Path) -> Result<String> {
    let bytes = fs::read(path).map_err(|e| Error::from(e).in_file(path))?;
    Ok(hex::encode(Sha256::digest(bytes)))
}

fn write_metadata(
    config: &PipelineConfig,
    manifest: &DatasetManifest,
    warnings: &[String],
    out: &mut ArtifactWriter,
) -> Result<()> {
    let mut inputs = vec![json!({
        "path": config.manifest,
        "sha256": sha256_file(&config.manifest)?,
    })];
    for path in manifest.referenced_paths() {
        inputs.push(json!({ "path": path, "sha256": sha256_file(&path)? }));
    }
    let artifacts = out
        .written()
        .iter()
        .map(|rel| {
            Ok(json!({
                "path": rel,
                "sha256": sha256_file(&out.root().join(rel))?,
            }))
        })
        .collect::<Result<Vec<_>>>()?;
    let meta = json!({
        "tool": env!("CARGO_PKG_NAME"),
        "version": env!("CARGO_PKG_VERSION"),
        "generated_at": chrono::Utc::now().to_rfc3339(),
        "config": {
            "manifest": config.manifest,
            "onset_threshold": config.onset_threshold.unwrap_or(manifest.onset_threshold),
            "constant_policy": config.constant_policy,
            "graph_formats": config.graph_formats.iter().map(|f| f.extension()).collect::<Vec<_>>(),
            "render": config.render,
            "seed": config.seed,
        },
        "inputs": inputs,
        "artifacts": artifacts,
        "warnings": warnings,
    });
    out.write(METADATA_FILE, to_json(&meta))
}

fn run_stages(
    config: &PipelineConfig,
    out: &mut ArtifactWriter,
) -> std::result::Result<RunArtifacts, PipelineError> {
    if let Some(t) = config.onset_threshold {
        if !(t > 0.0 && t <= 100.0) {
            return Err(Error::InvalidValue(format!(
                "onset threshold {t} is outside (0, 100]"
            )))
            .stage(Stage::Ingest);
        }
    }
    let manifest = DatasetManifest::load(&config.manifest).stage(Stage::Ingest)?;
    let ingest = stage_ingest(&manifest, config.onset_threshold, out).stage(Stage::Ingest)?;
    let matrix =
        stage_correlate(&ingest.panel, config.constant_policy, out).stage(Stage::Correlate)?;
    let tree = stage_tree(&matrix, &config.graph_formats, out).stage(Stage::Tree)?;
    let centrality = stage_centrality(&tree, out).stage(Stage::Centrality)?;
    let branches = stage_branches(&tree, out).stage(Stage::Branches)?;

    let mut warnings = ingest.warnings.clone();
    if config.render {
        let inputs = RenderInputs {
            keyword: Some(ingest.panel.keyword()),
            reference: ingest.reference.as_ref(),
            matrix: Some(&matrix),
            tree: Some((&tree, &centrality)),
            snapshots: &ingest.snapshots,
        };
        warnings.extend(stage_render(inputs, config.seed, out).stage(Stage::Render)?);
    }
    write_metadata(config, &manifest, &warnings, out).stage(Stage::Metadata)?;

    Ok(RunArtifacts {
        out_dir: out.root().to_path_buf(),
        files: out.written().to_vec(),
        panel: ingest.panel,
        matrix,
        tree,
        centrality,
        branches,
        warnings,
    })
}

/// Run every stage, writing artifacts under `config.out_dir`.
///
/// On failure the artifacts written so far are kept and a `FAILED` marker
/// naming the stage is added.
pub fn run_pipeline(config: &PipelineConfig) -> std::result::Result<RunArtifacts, PipelineError> {
    let mut out = ArtifactWriter::new(&config.out_dir).stage(Stage::Ingest)?;
    let marker = config.out_dir.join(FAILURE_MARKER);
    if marker.exists() {
        fs::remove_file(&marker)
            .map_err(|e| Error::from(e).in_file(&marker))
            .stage(Stage::Ingest)?;
    }
    run_stages(config, &mut out).inspect_err(|e| {
        // best effort: the original error is what the caller needs
        let _ = fs::write(&marker, format!("{e}\n"));
    })
}
