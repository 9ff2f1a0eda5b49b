//! Parse the two export dialects: interest over time (with `<1` cells) and
//! interest by region.

use trendnet::ingestion::{parse_interest_by_region_csv, parse_interest_over_time_csv};

const OVER_TIME: &str = "\u{feff}Category: All categories\r\n\r\n\
Day,coronavirus: (Italy)\r\n\
2020-01-18,0\r\n\
2020-01-19,<1\r\n\
2020-01-20,3\r\n\
2020-01-21,11\r\n\
2020-01-22,40\r\n";

const BY_REGION: &str = "Category: All categories

Country,coronavirus: (2/23/20 - 2/29/20)
Italy,100
Switzerland,61
\"Korea, South\",48
San Marino,
Atlantis,12
";

fn main() -> trendnet::Result<()> {
    let doc = parse_interest_over_time_csv(OVER_TIME)?;
    println!(
        "{} / {} / {} days from {}",
        doc.keyword,
        doc.geo,
        doc.grid.len(),
        doc.grid.start()
    );
    println!("raw:        {:?}", doc.raw_values);
    println!("normalized: {:?}", doc.to_normalized_series()?.values());
    print!("written back:\n{}", doc.to_csv());

    let d = |s: &str| s.parse().unwrap();
    let snap = parse_interest_by_region_csv(BY_REGION, (d("2020-02-23"), d("2020-02-29")))?;
    println!("{} countries, dominant {:?}", snap.len(), snap.dominant());
    for w in &snap.warnings {
        println!("warning: {w}");
    }
    Ok(())
}
