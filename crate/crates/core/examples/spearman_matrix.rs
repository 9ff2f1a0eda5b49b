//! Tie-aware Spearman coefficients, pairwise and as a full matrix over the
//! bundled 54-location fixture.

use std::path::Path;

use trendnet::ingestion::{load_dataset, DatasetManifest};
use trendnet::{average_ranks, correlation_matrix, spearman_rho, trim_to_onset, ConstantPolicy};

fn main() -> trendnet::Result<()> {
    let x = [1.0, 2.0, 2.0, 3.0];
    let y = [2.0, 1.0, 3.0, 4.0];
    println!("ranks of x: {:?}", average_ranks(&x)?);
    println!("rho(x, y) = {:.6}", spearman_rho(&x, &y)?);

    let manifest = DatasetManifest::load(
        Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/coronavirus/manifest.json"),
    )?;
    let data = load_dataset(&manifest)?;
    let panel = trim_to_onset(
        &data.panel,
        data.reference.as_ref().unwrap(),
        manifest.onset_threshold,
    )?;
    let m = correlation_matrix(&panel, ConstantPolicy::Error)?;

    let (i, j) = (m.index_of("IT").unwrap(), m.index_of("SG").unwrap());
    let k = m.index_of("ES").unwrap();
    println!("{0}x{0} matrix", m.len());
    println!("rho(IT, ES) = {:.4}", m.get(i, k));
    println!("rho(IT, SG) = {:.4}", m.get(i, j));

    let mut weakest: Vec<(f64, &str)> = m
        .labels()
        .iter()
        .enumerate()
        .map(|(a, geo)| {
            let mean = (m.row(a).iter().sum::<f64>() - 1.0) / (m.len() - 1) as f64;
            (mean, geo.as_str())
        })
        .collect();
    weakest.sort_by(|a, b| a.0.total_cmp(&b.0));
    println!("lowest mean correlation: {:?}", &weakest[..3]);
    Ok(())
}
