//! Run every stage on the fixture and list the artifacts.
//!
//! ```text
//! cargo run --example full_pipeline [-- <out-dir>]
//! ```

use std::path::PathBuf;

use trendnet::pipeline::run_pipeline;
use trendnet::PipelineConfig;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let out = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| root.join("../../target/pipeline-example"));
    let config = PipelineConfig::new(root.join("fixtures/coronavirus/manifest.json"), out);

    let run = run_pipeline(&config)?;
    println!(
        "onset {:?}, {} locations",
        run.panel.onset(),
        run.panel.len()
    );
    println!(
        "hub {} with {} branches",
        run.branches.hub,
        run.branches.branches.len()
    );
    for f in &run.files {
        println!("  {}", f.display());
    }
    Ok(())
}
