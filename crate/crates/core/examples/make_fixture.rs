//! Regenerate the bundled `fixtures/coronavirus` dataset.
//!
//! The curves are synthetic: a shared news bump after 2020-01-20 plus one
//! epidemic wave per region, with seeded noise. Running this twice produces
//! identical files.
//!
//! ```text
//! cargo run --example make_fixture [-- <out-dir>]
//! ```

use std::fs;
use std::path::PathBuf;

use chrono::{Duration, NaiveDate};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use trendnet::ingestion::{region_csv, RawValue, TrendsTimeCsv};
use trendnet::{DateGrid, Step};

const KEYWORD: &str = "coronavirus";
const SEED: u64 = 20200120;

/// (code, main wave peak as days after Jan 1, early-bump weight, popularity)
const LOCATIONS: &[(&str, i64, f64, f64)] = &[
    // East and South-East Asia
    ("CN", 28, 1.30, 0.55),
    ("HK", 35, 0.90, 0.80),
    ("TW", 40, 0.80, 0.70),
    ("JP", 55, 0.55, 0.60),
    ("KR", 58, 0.60, 0.75),
    ("SG", 37, 1.00, 0.90),
    ("MY", 76, 0.45, 0.65),
    ("TH", 78, 0.50, 0.60),
    ("VN", 60, 0.70, 0.70),
    ("PH", 80, 0.40, 0.65),
    ("ID", 84, 0.30, 0.55),
    ("IN", 85, 0.25, 0.50),
    ("PK", 86, 0.20, 0.45),
    // Middle East
    ("IR", 62, 0.20, 0.60),
    ("IL", 75, 0.25, 0.70),
    ("SA", 78, 0.20, 0.55),
    ("QA", 77, 0.25, 0.65),
    ("AE", 76, 0.30, 0.70),
    ("TR", 82, 0.20, 0.60),
    // Oceania
    ("AU", 78, 0.35, 0.85),
    ("NZ", 80, 0.30, 0.80),
    // Europe
    ("IT", 66, 0.25, 1.00),
    ("ES", 72, 0.20, 0.95),
    ("FR", 74, 0.20, 0.85),
    ("DE", 73, 0.20, 0.80),
    ("GB", 77, 0.25, 0.90),
    ("IE", 76, 0.25, 0.90),
    ("PT", 75, 0.20, 0.85),
    ("NL", 74, 0.20, 0.85),
    ("BE", 74, 0.20, 0.85),
    ("CH", 72, 0.25, 0.90),
    ("AT", 73, 0.20, 0.85),
    ("SE", 75, 0.20, 0.75),
    ("NO", 73, 0.20, 0.80),
    ("DK", 73, 0.20, 0.80),
    ("FI", 76, 0.20, 0.70),
    ("CZ", 75, 0.15, 0.70),
    ("UA", 80, 0.15, 0.55),
    ("RU", 83, 0.20, 0.55),
    // Americas
    ("US", 78, 0.25, 0.95),
    ("CA", 77, 0.25, 0.90),
    ("MX", 83, 0.15, 0.70),
    ("BR", 80, 0.15, 0.75),
    ("AR", 80, 0.15, 0.70),
    ("CL", 81, 0.15, 0.75),
    ("CO", 81, 0.15, 0.70),
    ("PE", 80, 0.15, 0.70),
    ("EC", 84, 0.10, 0.65),
    ("VE", 82, 0.10, 0.55),
    // Africa
    ("ZA", 82, 0.15, 0.65),
    ("NG", 85, 0.10, 0.45),
    ("EG", 80, 0.15, 0.55),
    ("KE", 84, 0.10, 0.50),
    ("MA", 79, 0.10, 0.55),
];

/// These keep going past the common end date.
const LONGER: &[&str] = &["US", "IT", "SG", "KR", "BR"];

fn d(s: &str) -> NaiveDate {
    s.parse().unwrap()
}

/// Unscaled daily interest, `t` in days after 2020-01-01.
fn curve(t: i64, peak: i64, bump: f64, rng: &mut ChaCha8Rng) -> f64 {
    if t < 19 {
        // before the story broke: mostly nothing, occasionally a trickle
        return if rng.gen_bool(0.15) { 0.002 } else { 0.0 };
    }
    let t = t as f64;
    let news = bump * (-((t - 27.0) / 8.0).powi(2)).exp() * (1.0 - (-(t - 18.0) / 2.0).exp());
    let peak = peak as f64;
    let width = if t < peak { 7.0 } else { 24.0 };
    let wave = (-((t - peak) / width).powi(2)).exp();
    let weekday = if (t as i64 + 2) % 7 >= 5 { 0.9 } else { 1.0 };
    let noise = 1.0 + rng.gen_range(-0.06..0.06);
    (0.04 + news + wave) * weekday * noise
}

fn to_raw(v: f64) -> RawValue {
    let r = v.round();
    if r >= 1.0 {
        RawValue::Value(r.min(100.0) as u8)
    } else if v > 0.0 {
        RawValue::BelowOne
    } else {
        RawValue::Value(0)
    }
}

fn scale(values: &[f64]) -> Vec<f64> {
    let max = values.iter().cloned().fold(0.0, f64::max);
    values.iter().map(|v| v / max * 100.0).collect()
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/coronavirus"));
    fs::create_dir_all(out.join("time"))?;
    fs::create_dir_all(out.join("regions"))?;

    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let start = d("2020-01-01");
    let end = d("2020-03-31");
    let long_end = d("2020-04-14");
    let days = (long_end - start).num_days() + 1;

    // unscaled curves over the long range, one per location
    let curves: Vec<Vec<f64>> = LOCATIONS
        .iter()
        .map(|&(_, peak, bump, _)| (0..days).map(|t| curve(t, peak, bump, &mut rng)).collect())
        .collect();

    let mut time_files = Vec::new();
    let write_series =
        |geo: &str, raw: Vec<RawValue>, last: NaiveDate| -> std::io::Result<String> {
            let grid = DateGrid::spanning(start, last, Step::Daily).expect("valid grid");
            let doc = TrendsTimeCsv {
                category: Some("All categories".into()),
                keyword: KEYWORD.into(),
                geo: geo.into(),
                grid,
                raw_values: raw[..grid.len()].to_vec(),
            };
            let rel = format!("time/{geo}.csv");
            fs::write(out.join(&rel), doc.to_csv())?;
            Ok(rel)
        };

    // popularity-weighted sum stands in for the worldwide series
    let world: Vec<f64> = (0..days as usize)
        .map(|i| {
            LOCATIONS
                .iter()
                .zip(&curves)
                .map(|(&(_, _, _, pop), c)| pop * c[i] / c.iter().cloned().fold(0.0, f64::max))
                .sum()
        })
        .collect();
    let world_len = (end - start).num_days() as usize + 1;
    let world_raw: Vec<RawValue> = scale(&world[..world_len]).into_iter().map(to_raw).collect();
    time_files.push(json!({"geo": "WORLD", "path": write_series("WORLD", world_raw, end)?}));

    for (&(geo, ..), c) in LOCATIONS.iter().zip(&curves) {
        let last = if LONGER.contains(&geo) { long_end } else { end };
        let n = (last - start).num_days() as usize + 1;
        let raw = scale(&c[..n]).into_iter().map(to_raw).collect();
        time_files.push(json!({"geo": geo, "path": write_series(geo, raw, last)?}));
    }

    // weekly snapshots, comparable across countries via popularity
    let mut region_files = Vec::new();
    for w in 0..15 {
        let ws = start + Duration::days(7 * w);
        let we = ws + Duration::days(6);
        let range = (7 * w) as usize..(7 * w + 7) as usize;
        let mut rows: Vec<(String, f64)> = LOCATIONS
            .iter()
            .zip(&curves)
            .filter(|&(&(geo, ..), _)| !(w < 3 && matches!(geo, "NG" | "KE" | "EC")))
            .map(|(&(geo, _, _, pop), c)| {
                let max = c.iter().cloned().fold(0.0, f64::max);
                let mean = c[range.clone()].iter().sum::<f64>() / 7.0;
                (geo.to_string(), pop * mean / max)
            })
            .collect();
        let top = rows.iter().map(|r| r.1).fold(0.0, f64::max);
        for r in &mut rows {
            r.1 = r.1 / top * 100.0;
        }
        let rows: Vec<(String, RawValue)> = rows.into_iter().map(|(g, v)| (g, to_raw(v))).collect();
        let rel = format!("regions/{ws}.csv");
        fs::write(out.join(&rel), region_csv(KEYWORD, (ws, we), &rows))?;
        region_files.push(json!({"start": ws, "end": we, "path": rel}));
    }

    let manifest = json!({
        "keyword": KEYWORD,
        "onset_threshold": 1.0,
        "notes": "Synthetic daily interest for 54 countries plus a worldwide reference; regenerate with `cargo run --example make_fixture`.",
        "time_files": time_files,
        "region_files": region_files,
    });
    fs::write(
        out.join("manifest.json"),
        serde_json::to_string_pretty(&manifest)? + "\n",
    )?;
    println!("wrote {} locations to {}", LOCATIONS.len(), out.display());
    Ok(())
}
