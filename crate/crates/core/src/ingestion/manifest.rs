//! Multi-file datasets described by a JSON manifest.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use super::export::{parse_interest_by_region_csv, parse_interest_over_time_csv, RegionSnapshot};
use crate::error::{Error, Result};
use crate::timeseries::{align_panel, LocationSeries, Panel, WORLD};

fn default_threshold() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeFile {
    pub geo: String,
    pub path: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionFile {
    pub start: NaiveDate,
    pub end: NaiveDate,
    pub path: PathBuf,
}

/// Relative paths are resolved against the manifest's own directory.
///
/// A time file listed under the `WORLD` geo is the reference series used
/// for onset trimming; it is kept out of the correlation panel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub keyword: String,
    pub time_files: Vec<TimeFile>,
    #[serde(default)]
    pub region_files: Vec<RegionFile>,
    #[serde(default = "default_threshold")]
    pub onset_threshold: f64,
    #[serde(default)]
    pub notes: String,
    #[serde(skip)]
    pub base_dir: PathBuf,
}

impl DatasetManifest {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::from(e).in_file(path))?;
        let mut manifest: DatasetManifest =
            serde_json::from_str(&text).map_err(|e| Error::from(e).in_file(path))?;
        manifest.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(manifest)
    }

    pub fn resolve(&self, path: &Path) -> PathBuf {
        if path.is_absolute() {
            path.to_path_buf()
        } else {
            self.base_dir.join(path)
        }
    }

    /// Every file the manifest references, resolved.
    pub fn referenced_paths(&self) -> Vec<PathBuf> {
        self.time_files
            .iter()
            .map(|f| &f.path)
            .chain(self.region_files.iter().map(|f| &f.path))
            .map(|p| self.resolve(p))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    /// Normalized, aligned location series (the reference excluded).
    pub panel: Panel,
    /// Normalized worldwide series, if the manifest lists one.
    pub reference: Option<LocationSeries>,
    /// Ordered by window start, then end.
    pub snapshots: Vec<RegionSnapshot>,
    pub warnings: Vec<String>,
}

pub fn load_dataset(manifest: &DatasetManifest) -> Result<Dataset> {
    let mut seen = BTreeSet::new();
    for f in &manifest.time_files {
        if !seen.insert(f.geo.as_str()) {
            return Err(Error::DuplicateLocation(f.geo.clone()));
        }
    }

    let mut reference = None;
    let mut series = Vec::with_capacity(manifest.time_files.len());
    for f in &manifest.time_files {
        let path = manifest.resolve(&f.path);
        let read = || -> Result<LocationSeries> {
            let doc = parse_interest_over_time_csv(&fs::read_to_string(&path)?)?;
            if doc.geo != f.geo {
                return Err(Error::LabelMismatch(format!(
                    "manifest lists `{}` but the file holds `{}`",
                    f.geo, doc.geo
                )));
            }
            if doc.keyword != manifest.keyword {
                return Err(Error::KeywordMismatch(
                    manifest.keyword.clone(),
                    doc.keyword.clone(),
                ));
            }
            doc.to_normalized_series()
        };
        let s = read().map_err(|e| e.in_file(&path))?;
        if s.geo() == WORLD {
            reference = Some(s);
        } else {
            series.push(s);
        }
    }
    let panel = align_panel(series)?;

    let mut snapshots = manifest
        .region_files
        .iter()
        .map(|f| {
            let path = manifest.resolve(&f.path);
            fs::read_to_string(&path)
                .map_err(Error::from)
                .and_then(|text| parse_interest_by_region_csv(&text, (f.start, f.end)))
                .map_err(|e| e.in_file(&path))
        })
        .collect::<Result<Vec<_>>>()?;
    snapshots.sort_by_key(|s| (s.start, s.end));

    let warnings = snapshots
        .iter()
        .flat_map(|s| {
            s.warnings
                .iter()
                .map(move |w| format!("{}..{}: {w}", s.start, s.end))
        })
        .collect();

    Ok(Dataset {
        panel,
        reference,
        snapshots,
        warnings,
    })
}
