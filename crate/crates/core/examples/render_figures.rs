//! Draw the four figure types for the fixture into `target/figures-example`.

use std::fs;
use std::path::Path;

use trendnet::ingestion::{load_dataset, DatasetManifest};
use trendnet::viz::{
    render_choropleth_frames, render_heatmap, render_line_chart, render_tree, ColorMap, RenderSpec,
};
use trendnet::{
    correlation_matrix, degree_centrality, graph_from_matrix, maximum_spanning_tree, trim_to_onset,
    ConstantPolicy,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let root = Path::new(env!("CARGO_MANIFEST_DIR"));
    let out = root.join("../../target/figures-example");
    fs::create_dir_all(&out)?;

    let manifest = DatasetManifest::load(root.join("fixtures/coronavirus/manifest.json"))?;
    let data = load_dataset(&manifest)?;
    let world = data.reference.as_ref().unwrap();
    let panel = trim_to_onset(&data.panel, world, 1.0)?;
    let m = correlation_matrix(&panel, ConstantPolicy::Error)?;
    let tree = maximum_spanning_tree(&graph_from_matrix(&m)?)?;

    fs::write(
        out.join("trend.svg"),
        render_line_chart(world, &RenderSpec::titled("Worldwide"))?,
    )?;
    fs::write(
        out.join("heatmap.svg"),
        render_heatmap(&m, &RenderSpec::titled("Spearman").with_size(960, 1040))?,
    )?;
    fs::write(
        out.join("tree.svg"),
        render_tree(
            &tree,
            &degree_centrality(&tree),
            &RenderSpec::default().with_seed(7),
        )?,
    )?;
    let spec = RenderSpec::titled("By country").with_color_map(ColorMap::Sequential);
    let frames = render_choropleth_frames(&data.snapshots, &spec)?;
    for (k, f) in frames.iter().enumerate() {
        fs::write(out.join(format!("frame_{k:03}.svg")), &f.svg)?;
    }
    println!(
        "wrote {} choropleth frames and 3 figures to {}",
        frames.len(),
        out.display()
    );
    Ok(())
}
