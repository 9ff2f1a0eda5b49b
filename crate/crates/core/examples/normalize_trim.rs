//! Normalize raw interest values, align a few series and trim them to the
//! day worldwide interest first reaches the onset threshold.

use chrono::NaiveDate;
use trendnet::{align_panel, normalize_rsv, trim_to_onset, DateGrid, LocationSeries, Step};

fn main() -> trendnet::Result<()> {
    let d = |s: &str| s.parse::<NaiveDate>().unwrap();

    let raw = [0.0, 0.5, 3.0, 12.0, 40.0, 31.0];
    println!("normalized: {:?}", normalize_rsv(&raw)?);

    // overlapping but different date ranges
    let it = LocationSeries::new(
        "IT",
        "coronavirus",
        DateGrid::new(d("2020-01-01"), Step::Daily, 8)?,
        normalize_rsv(&[0.0, 0.0, 1.0, 2.0, 8.0, 20.0, 55.0, 80.0])?,
    )?;
    let kr = LocationSeries::new(
        "KR",
        "coronavirus",
        DateGrid::new(d("2020-01-02"), Step::Daily, 8)?,
        normalize_rsv(&[0.0, 4.0, 9.0, 30.0, 70.0, 66.0, 40.0, 35.0])?,
    )?;
    let panel = align_panel([it, kr])?;
    println!(
        "aligned {} series on {}..{}",
        panel.len(),
        panel.grid().start(),
        panel.grid().end()
    );

    let world = LocationSeries::new(
        "WORLD",
        "coronavirus",
        DateGrid::new(d("2020-01-01"), Step::Daily, 10)?,
        normalize_rsv(&[0.2, 0.3, 0.4, 0.6, 2.0, 10.0, 40.0, 100.0, 90.0, 85.0])?,
    )?;
    let trimmed = trim_to_onset(&panel, &world, 1.0)?;
    println!(
        "onset {} -> {} days remain",
        trimmed.onset().unwrap(),
        trimmed.grid().len()
    );
    for s in trimmed.series() {
        println!("  {}: {:?}", s.geo(), s.values());
    }
    Ok(())
}
