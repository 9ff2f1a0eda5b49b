//! Relative-search-volume series and date-aligned panels.
//!
//! Every series lives on a [`DateGrid`]: a start date, a fixed step and a
//! length. A [`Panel`] holds several series on one shared grid, ordered
//! lexicographically by geo code so that everything derived from it
//! (matrices, exports, renders) comes out in a canonical order.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use chrono::{Duration, NaiveDate};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Geo code used for the worldwide aggregate series.
pub const WORLD: &str = "WORLD";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Step {
    Daily,
    Weekly,
}

impl Step {
    pub fn days(self) -> i64 {
        match self {
            Step::Daily => 1,
            Step::Weekly => 7,
        }
    }

    pub fn from_days(days: i64) -> Option<Step> {
        match days {
            1 => Some(Step::Daily),
            7 => Some(Step::Weekly),
            _ => None,
        }
    }
}

impl fmt::Display for Step {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Step::Daily => "daily",
            Step::Weekly => "weekly",
        })
    }
}

impl FromStr for Step {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "daily" | "day" => Ok(Step::Daily),
            "weekly" | "week" => Ok(Step::Weekly),
            other => Err(Error::InvalidValue(format!("unknown step `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "GridRepr")]
pub struct DateGrid {
    start: NaiveDate,
    step: Step,
    length: usize,
}

#[derive(Deserialize)]
struct GridRepr {
    start: NaiveDate,
    step: Step,
    length: usize,
}

impl TryFrom<GridRepr> for DateGrid {
    type Error = Error;

    fn try_from(r: GridRepr) -> Result<Self> {
        DateGrid::new(r.start, r.step, r.length)
    }
}

impl DateGrid {
    pub fn new(start: NaiveDate, step: Step, length: usize) -> Result<Self> {
        if length == 0 {
            return Err(Error::EmptySeries);
        }
        Ok(DateGrid {
            start,
            step,
            length,
        })
    }

    /// Grid covering `start..=end` inclusive. `end` must sit on the grid.
    pub fn spanning(start: NaiveDate, end: NaiveDate, step: Step) -> Result<Self> {
        let days = (end - start).num_days();
        if days < 0 || days % step.days() != 0 {
            return Err(Error::GridMismatch(format!(
                "{start}..{end} is not a whole number of {step} steps"
            )));
        }
        DateGrid::new(start, step, (days / step.days()) as usize + 1)
    }

    pub fn start(&self) -> NaiveDate {
        self.start
    }

    pub fn step(&self) -> Step {
        self.step
    }

    pub fn len(&self) -> usize {
        self.length
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn end(&self) -> NaiveDate {
        self.date(self.length - 1)
    }

    pub fn date(&self, index: usize) -> NaiveDate {
        self.start + Duration::days(index as i64 * self.step.days())
    }

    pub fn dates(&self) -> impl Iterator<Item = NaiveDate> + '_ {
        (0..self.length).map(|i| self.date(i))
    }

    /// Position of `date` on this grid, if it falls on a grid point.
    pub fn index_of(&self, date: NaiveDate) -> Option<usize> {
        let days = (date - self.start).num_days();
        if days < 0 || days % self.step.days() != 0 {
            return None;
        }
        let idx = (days / self.step.days()) as usize;
        (idx < self.length).then_some(idx)
    }

    /// True when both grids share a step and their points coincide.
    pub fn is_phase_aligned(&self, other: &DateGrid) -> bool {
        self.step == other.step && (other.start - self.start).num_days() % self.step.days() == 0
    }

    fn sub_grid(&self, offset: usize, length: usize) -> DateGrid {
        DateGrid {
            start: self.date(offset),
            step: self.step,
            length,
        }
    }
}

/// One geography's relative search volume for one keyword.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SeriesRepr")]
pub struct LocationSeries {
    geo: String,
    keyword: String,
    grid: DateGrid,
    values: Vec<f64>,
}

#[derive(Deserialize)]
struct SeriesRepr {
    geo: String,
    keyword: String,
    grid: DateGrid,
    values: Vec<f64>,
}

impl TryFrom<SeriesRepr> for LocationSeries {
    type Error = Error;

    fn try_from(r: SeriesRepr) -> Result<Self> {
        LocationSeries::new(r.geo, r.keyword, r.grid, r.values)
    }
}

impl LocationSeries {
    pub fn new(
        geo: impl Into<String>,
        keyword: impl Into<String>,
        grid: DateGrid,
        values: Vec<f64>,
    ) -> Result<Self> {
        let geo = geo.into();
        if values.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "`{geo}` has {} values for a grid of length {}",
                values.len(),
                grid.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| !(0.0..=100.0).contains(*v)) {
            return Err(Error::InvalidValue(format!(
                "`{geo}` contains {v}, outside [0, 100]"
            )));
        }
        Ok(LocationSeries {
            geo,
            keyword: keyword.into(),
            grid,
            values,
        })
    }

    pub fn geo(&self) -> &str {
        &self.geo
    }

    pub fn keyword(&self) -> &str {
        &self.keyword
    }

    pub fn grid(&self) -> &DateGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value_at(&self, date: NaiveDate) -> Option<f64> {
        self.grid.index_of(date).map(|i| self.values[i])
    }

    /// Copy rescaled so the maximum is exactly 100.
    pub fn normalized(&self) -> Result<LocationSeries> {
        Ok(LocationSeries {
            values: normalize_rsv(&self.values)?,
            ..self.clone()
        })
    }

    /// Restrict to the inclusive date range `[start, end]`, which must lie
    /// on this series' grid.
    pub fn crop(&self, start: NaiveDate, end: NaiveDate) -> Result<LocationSeries> {
        let (Some(first), Some(last)) = (self.grid.index_of(start), self.grid.index_of(end)) else {
            return Err(Error::GridMismatch(format!(
                "`{}` does not cover {start}..{end}",
                self.geo
            )));
        };
        if last < first {
            return Err(Error::NoOverlap);
        }
        Ok(LocationSeries {
            geo: self.geo.clone(),
            keyword: self.keyword.clone(),
            grid: self.grid.sub_grid(first, last - first + 1),
            values: self.values[first..=last].to_vec(),
        })
    }
}

/// Date-aligned series on a shared grid, sorted by geo.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PanelRepr")]
pub struct Panel {
    keyword: String,
    grid: DateGrid,
    /// First date kept by [`trim_to_onset`], if the panel has been trimmed.
    onset: Option<NaiveDate>,
    series: Vec<LocationSeries>,
}

#[derive(Deserialize)]
struct PanelRepr {
    keyword: String,
    grid: DateGrid,
    onset: Option<NaiveDate>,
    series: Vec<LocationSeries>,
}

impl TryFrom<PanelRepr> for Panel {
    type Error = Error;

    fn try_from(r: PanelRepr) -> Result<Self> {
        let mut panel = align_panel(r.series)?;
        if panel.grid != r.grid || panel.keyword != r.keyword {
            return Err(Error::GridMismatch(
                "panel header disagrees with its series".into(),
            ));
        }
        panel.onset = r.onset;
        Ok(panel)
    }
}

impl Panel {
    pub fn keyword(&self) -> &str {
        &self.keyword
    }

    pub fn grid(&self) -> &DateGrid {
        &self.grid
    }

    pub fn onset(&self) -> Option<NaiveDate> {
        self.onset
    }

    pub fn series(&self) -> &[LocationSeries] {
        &self.series
    }

    pub fn len(&self) -> usize {
        self.series.len()
    }

    pub fn is_empty(&self) -> bool {
        self.series.is_empty()
    }

    pub fn geos(&self) -> impl Iterator<Item = &str> {
        self.series.iter().map(|s| s.geo())
    }

    pub fn get(&self, geo: &str) -> Option<&LocationSeries> {
        self.series
            .binary_search_by(|s| s.geo.as_str().cmp(geo))
            .ok()
            .map(|i| &self.series[i])
    }
}

/// Rescale non-negative raw counts so the maximum becomes 100.
///
/// An all-zero input stays all zeros, and one already peaking at exactly 100
/// is returned unchanged.
pub fn normalize_rsv(raw: &[f64]) -> Result<Vec<f64>> {
    if raw.is_empty() {
        return Err(Error::EmptySeries);
    }
    if let Some(v) = raw.iter().find(|v| !v.is_finite() || **v < 0.0) {
        return Err(Error::InvalidValue(format!(
            "{v} is not a finite non-negative value"
        )));
    }
    let max = raw.iter().copied().fold(0.0_f64, f64::max);
    if max == 0.0 {
        return Ok(vec![0.0; raw.len()]);
    }
    if max == 100.0 {
        return Ok(raw.to_vec());
    }
    // divide first so the argmax lands on exactly 100
    Ok(raw.iter().map(|v| v / max * 100.0).collect())
}

/// Crop a set of series to their common date range and sort them by geo.
pub fn align_panel(series_set: impl IntoIterator<Item = LocationSeries>) -> Result<Panel> {
    let mut series: Vec<LocationSeries> = series_set.into_iter().collect();
    if series.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "a panel needs at least 2 series, got {}",
            series.len()
        )));
    }
    series.sort_by(|a, b| a.geo.cmp(&b.geo));

    let mut seen = BTreeSet::new();
    for s in &series {
        if !seen.insert(s.geo.as_str()) {
            return Err(Error::DuplicateLocation(s.geo.clone()));
        }
    }

    let first = &series[0];
    for s in &series[1..] {
        if s.keyword != first.keyword {
            return Err(Error::KeywordMismatch(
                first.keyword.clone(),
                s.keyword.clone(),
            ));
        }
        if !s.grid.is_phase_aligned(&first.grid) {
            return Err(Error::GridMismatch(format!(
                "`{}` ({}, from {}) and `{}` ({}, from {}) are not on a common grid",
                first.geo, first.grid.step, first.grid.start, s.geo, s.grid.step, s.grid.start
            )));
        }
    }

    let start = series.iter().map(|s| s.grid.start()).max().unwrap();
    let end = series.iter().map(|s| s.grid.end()).min().unwrap();
    if start > end {
        return Err(Error::NoOverlap);
    }
    let cropped = series
        .iter()
        .map(|s| s.crop(start, end))
        .collect::<Result<Vec<_>>>()?;

    Ok(Panel {
        keyword: first.keyword.clone(),
        grid: cropped[0].grid,
        onset: None,
        series: cropped,
    })
}

/// Drop every date before the reference series first reaches `threshold`.
///
/// The reference must be on the panel's grid and cover the panel's date
/// range; it may extend beyond it.
pub fn trim_to_onset(panel: &Panel, reference: &LocationSeries, threshold: f64) -> Result<Panel> {
    if !(threshold > 0.0 && threshold <= 100.0) {
        return Err(Error::InvalidValue(format!(
            "onset threshold {threshold} is outside (0, 100]"
        )));
    }
    let grid = panel.grid;
    if !reference.grid.is_phase_aligned(&grid)
        || reference.grid.index_of(grid.start()).is_none()
        || reference.grid.index_of(grid.end()).is_none()
    {
        return Err(Error::GridMismatch(format!(
            "reference `{}` does not cover the panel grid {}..{}",
            reference.geo,
            grid.start(),
            grid.end()
        )));
    }

    let onset = grid
        .dates()
        .find(|d| reference.value_at(*d).is_some_and(|v| v >= threshold))
        .ok_or(Error::OnsetNotFound { threshold })?;

    let series = panel
        .series
        .iter()
        .map(|s| s.crop(onset, grid.end()))
        .collect::<Result<Vec<_>>>()?;
    Ok(Panel {
        keyword: panel.keyword.clone(),
        grid: series[0].grid,
        onset: Some(onset),
        series,
    })
}
