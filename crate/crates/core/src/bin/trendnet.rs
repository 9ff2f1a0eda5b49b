//! Command-line front end; every subcommand is a thin wrapper over
//! `trendnet::pipeline` stage functions.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use chrono::NaiveDate;
use clap::{Args, Parser, Subcommand};

use trendnet::ingestion::{
    CachedFetcher, DatasetManifest, FetchRequest, ReplayTransport, CACHE_DIR_ENV,
};
use trendnet::pipeline::{self, ArtifactWriter, PipelineConfig, RenderInputs};
use trendnet::viz::{export_graph, GraphFormat};
use trendnet::{ConstantPolicy, Error, Step};

#[derive(Parser)]
#[command(
    name = "trendnet",
    version,
    about = "Correlation networks from search-interest time series"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every stage from a manifest.
    Pipeline {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        onset_threshold: Option<f64>,
        #[arg(long, default_value = "error")]
        constant_policy: ConstantPolicy,
        #[arg(long, default_value_t = pipeline::DEFAULT_SEED)]
        seed: u64,
        /// Graph export formats (repeatable): dot, graphml, json.
        #[arg(long = "format")]
        formats: Vec<String>,
        #[arg(long)]
        no_render: bool,
    },
    /// Load, normalize, align and trim; writes panel/reference/snapshots JSON.
    Ingest {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        onset_threshold: Option<f64>,
    },
    /// Spearman matrix from a panel JSON.
    Correlate {
        #[arg(long)]
        panel: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value = "error")]
        constant_policy: ConstantPolicy,
    },
    /// Complete graph and maximum spanning tree from a matrix (.json or .csv).
    Tree {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long = "format")]
        formats: Vec<String>,
    },
    /// Degree centrality of a tree JSON.
    Centrality {
        #[arg(long)]
        tree: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Hub-removal branches of a tree JSON.
    Branches {
        #[arg(long)]
        tree: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// SVG figures from whichever artifacts are given.
    Render(RenderArgs),
    /// Convert a graph or tree JSON to another format, printed to stdout.
    Export {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, default_value = "dot")]
        format: String,
    },
    /// Fetch one series through the cache, replaying exports from a directory.
    Fetch {
        #[arg(long)]
        replay_dir: PathBuf,
        #[arg(long, env = CACHE_DIR_ENV, default_value = ".trendnet-cache")]
        cache_dir: PathBuf,
        #[arg(long)]
        keyword: String,
        #[arg(long)]
        geo: String,
        #[arg(long)]
        start: NaiveDate,
        #[arg(long)]
        end: NaiveDate,
        #[arg(long, default_value = "daily")]
        step: Step,
    },
}

#[derive(Args)]
struct RenderArgs {
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    reference: Option<PathBuf>,
    #[arg(long)]
    matrix: Option<PathBuf>,
    #[arg(long, requires = "centrality")]
    tree: Option<PathBuf>,
    #[arg(long, requires = "tree")]
    centrality: Option<PathBuf>,
    #[arg(long)]
    snapshots: Option<PathBuf>,
    #[arg(long, default_value_t = pipeline::DEFAULT_SEED)]
    seed: u64,
    #[arg(long, default_value = "svg")]
    format: String,
}

fn graph_formats(raw: &[String]) -> Result<Vec<GraphFormat>, Error> {
    if raw.is_empty() {
        return Ok(GraphFormat::ALL.to_vec());
    }
    raw.iter().map(|s| s.parse()).collect()
}

fn report(out: &ArtifactWriter) {
    for f in out.written() {
        println!("{}", out.root().join(f).display());
    }
}

fn optional<T>(
    path: Option<&Path>,
    read: impl Fn(&Path) -> trendnet::Result<T>,
) -> trendnet::Result<Option<T>> {
    path.map(read).transpose()
}

fn run(cli: Cli) -> Result<(), Box<dyn std::error::Error>> {
    match cli.command {
        Command::Pipeline {
            manifest,
            out,
            onset_threshold,
            constant_policy,
            seed,
            formats,
            no_render,
        } => {
            let mut config = PipelineConfig::new(manifest, out);
            config.onset_threshold = onset_threshold;
            config.constant_policy = constant_policy;
            config.seed = seed;
            config.graph_formats = graph_formats(&formats)?;
            config.render = !no_render;
            let artifacts = pipeline::run_pipeline(&config)?;
            for w in &artifacts.warnings {
                eprintln!("warning: {w}");
            }
            for f in &artifacts.files {
                println!("{}", artifacts.out_dir.join(f).display());
            }
        }
        Command::Ingest {
            manifest,
            out,
            onset_threshold,
        } => {
            let manifest = DatasetManifest::load(&manifest)?;
            let mut w = ArtifactWriter::new(out)?;
            let ingest = pipeline::stage_ingest(&manifest, onset_threshold, &mut w)?;
            for warning in &ingest.warnings {
                eprintln!("warning: {warning}");
            }
            report(&w);
        }
        Command::Correlate {
            panel,
            out,
            constant_policy,
        } => {
            let panel = pipeline::read_panel(&panel)?;
            let mut w = ArtifactWriter::new(out)?;
            pipeline::stage_correlate(&panel, constant_policy, &mut w)?;
            report(&w);
        }
        Command::Tree {
            matrix,
            out,
            formats,
        } => {
            let m = pipeline::read_matrix(&matrix)?;
            let mut w = ArtifactWriter::new(out)?;
            pipeline::stage_tree(&m, &graph_formats(&formats)?, &mut w)?;
            report(&w);
        }
        Command::Centrality { tree, out } => {
            let tree = pipeline::read_tree(&tree)?;
            let mut w = ArtifactWriter::new(out)?;
            pipeline::stage_centrality(&tree, &mut w)?;
            report(&w);
        }
        Command::Branches { tree, out } => {
            let tree = pipeline::read_tree(&tree)?;
            let mut w = ArtifactWriter::new(out)?;
            pipeline::stage_branches(&tree, &mut w)?;
            report(&w);
        }
        Command::Render(args) => {
            if !args.format.eq_ignore_ascii_case("svg") {
                return Err(Error::UnsupportedFormat(args.format).into());
            }
            let reference = optional(args.reference.as_deref(), pipeline::read_series)?;
            let matrix = optional(args.matrix.as_deref(), pipeline::read_matrix)?;
            let tree = optional(args.tree.as_deref(), pipeline::read_tree)?;
            let centrality = optional(args.centrality.as_deref(), pipeline::read_centrality)?;
            let snapshots =
                optional(args.snapshots.as_deref(), pipeline::read_snapshots)?.unwrap_or_default();
            let keyword = reference
                .as_ref()
                .map(|r| r.keyword().to_owned())
                .or_else(|| snapshots.first().map(|s| s.keyword.clone()));
            let inputs = RenderInputs {
                keyword: keyword.as_deref(),
                reference: reference.as_ref(),
                matrix: matrix.as_ref(),
                tree: tree.as_ref().zip(centrality.as_ref()),
                snapshots: &snapshots,
            };
            let mut w = ArtifactWriter::new(args.out)?;
            for warning in pipeline::stage_render(inputs, args.seed, &mut w)? {
                eprintln!("warning: {warning}");
            }
            report(&w);
        }
        Command::Export { graph, format } => {
            let format: GraphFormat = format.parse()?;
            let g = pipeline::read_graph(&graph)?;
            print!("{}", export_graph(&g, format));
        }
        Command::Fetch {
            replay_dir,
            cache_dir,
            keyword,
            geo,
            start,
            end,
            step,
        } => {
            let fetcher = CachedFetcher::new(ReplayTransport::new(replay_dir), cache_dir);
            let doc = fetcher.cached_fetch(&FetchRequest {
                keyword,
                geo,
                start,
                end,
                step,
            })?;
            print!("{}", doc.to_csv());
            let stats = fetcher.stats();
            eprintln!("cache hits {}, misses {}", stats.hits, stats.misses);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
