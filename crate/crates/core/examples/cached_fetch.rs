//! Fetch series through the on-disk cache, replaying the fixture exports in
//! place of a live service.

use std::path::Path;
use std::sync::Arc;
use std::time::Duration;

use trendnet::ingestion::{
    CachedFetcher, FetchPolicy, FetchRequest, ReplayTransport, ThreadSleeper,
};
use trendnet::Step;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let replay = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/coronavirus/time");
    let cache = scratch_dir()?;
    let policy = FetchPolicy {
        min_interval: Duration::from_millis(50),
        ..FetchPolicy::default()
    };
    let fetcher = CachedFetcher::with_policy(
        ReplayTransport::new(replay),
        &cache,
        policy,
        Arc::new(ThreadSleeper),
    );

    let request = |geo: &str| FetchRequest {
        keyword: "coronavirus".into(),
        geo: geo.into(),
        start: "2020-02-01".parse().unwrap(),
        end: "2020-02-14".parse().unwrap(),
        step: Step::Daily,
    };
    for geo in ["IT", "KR", "IT"] {
        let doc = fetcher.cached_fetch(&request(geo))?;
        println!(
            "{geo}: {} days, first {:?}",
            doc.grid.len(),
            doc.raw_values[0]
        );
    }
    println!("{:?}", fetcher.stats());
    std::fs::remove_dir_all(&cache)?;
    Ok(())
}

fn scratch_dir() -> std::io::Result<std::path::PathBuf> {
    let dir = std::env::temp_dir().join(format!("trendnet-example-{}", std::process::id()));
    std::fs::create_dir_all(&dir)?;
    Ok(dir)
}
