//! Google Trends CSV export dialect.
//!
//! Interest-over-time documents look like
//!
//! ```text
//! Category: All categories
//!
//! Day,coronavirus: (Worldwide)
//! 2020-01-01,0
//! 2020-01-02,<1
//! ```
//!
//! and interest-by-region documents carry one `Country,<keyword>: (<range>)`
//! header followed by `name,value` rows.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use super::regions::{self, Resolution};
use crate::error::{Error, Result};
use crate::timeseries::{normalize_rsv, DateGrid, LocationSeries, Step};

/// Value substituted for a censored `<1` cell.
pub const BELOW_ONE: f64 = 0.5;

/// One exported cell: an integer 0–100 or the censored token `<1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RawValue {
    Value(u8),
    BelowOne,
}

impl RawValue {
    pub fn parse(cell: &str) -> std::result::Result<RawValue, String> {
        let cell = cell.trim();
        if cell == "<1" {
            return Ok(RawValue::BelowOne);
        }
        let v: i64 = cell
            .parse()
            .map_err(|_| format!("`{cell}` is not an integer or `<1`"))?;
        u8::try_from(v)
            .ok()
            .filter(|v| *v <= 100)
            .map(RawValue::Value)
            .ok_or_else(|| format!("{v} is outside [0, 100]"))
    }

    pub fn as_f64(self) -> f64 {
        match self {
            RawValue::Value(v) => v as f64,
            RawValue::BelowOne => BELOW_ONE,
        }
    }
}

impl std::fmt::Display for RawValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RawValue::Value(v) => write!(f, "{v}"),
            RawValue::BelowOne => f.write_str("<1"),
        }
    }
}

/// A parsed interest-over-time export.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrendsTimeCsv {
    /// Preamble category, e.g. `All categories`.
    pub category: Option<String>,
    pub keyword: String,
    pub geo: String,
    pub grid: DateGrid,
    pub raw_values: Vec<RawValue>,
}

impl TrendsTimeCsv {
    /// Values with `<1` replaced by [`BELOW_ONE`].
    pub fn values(&self) -> Vec<f64> {
        self.raw_values.iter().map(|v| v.as_f64()).collect()
    }

    pub fn to_series(&self) -> Result<LocationSeries> {
        LocationSeries::new(&self.geo, &self.keyword, self.grid, self.values())
    }

    /// Series rescaled so its maximum is 100.
    pub fn to_normalized_series(&self) -> Result<LocationSeries> {
        LocationSeries::new(
            &self.geo,
            &self.keyword,
            self.grid,
            normalize_rsv(&self.values())?,
        )
    }

    /// Serialize in the export dialect; `<1` cells are written back as `<1`.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        if let Some(category) = &self.category {
            writeln!(out, "Category: {category}").unwrap();
            out.push('\n');
        }
        let column = match self.grid.step() {
            Step::Daily => "Day",
            Step::Weekly => "Week",
        };
        let place = regions::display_name(&self.geo).unwrap_or(&self.geo);
        writeln!(out, "{column},{}: ({place})", self.keyword).unwrap();
        for (date, v) in self.grid.dates().zip(&self.raw_values) {
            writeln!(out, "{},{v}", date.format("%Y-%m-%d")).unwrap();
        }
        out
    }

    /// Restrict to the inclusive range `[start, end]`.
    pub fn crop(&self, start: NaiveDate, end: NaiveDate) -> Result<TrendsTimeCsv> {
        let (Some(a), Some(b)) = (self.grid.index_of(start), self.grid.index_of(end)) else {
            return Err(Error::GridMismatch(format!(
                "`{}` does not cover {start}..{end}",
                self.geo
            )));
        };
        if b < a {
            return Err(Error::NoOverlap);
        }
        Ok(TrendsTimeCsv {
            grid: DateGrid::new(start, self.grid.step(), b - a + 1)?,
            raw_values: self.raw_values[a..=b].to_vec(),
            ..self.clone()
        })
    }
}

/// Split `<keyword>: (<place>)`.
fn split_series_label(label: &str) -> Option<(&str, &str)> {
    let label = label.trim();
    let inner = label.strip_suffix(')')?;
    let (keyword, place) = inner.rsplit_once(": (")?;
    Some((keyword, place))
}

fn resolve_geo(place: &str) -> Option<String> {
    let place = place.trim();
    if place.len() == 2 && place.chars().all(|c| c.is_ascii_uppercase()) {
        return Some(place.to_owned());
    }
    regions::resolve_code(place).map(str::to_owned)
}

/// Lines of the document with their 1-based numbers, after the optional
/// `Category:` preamble and blank lines. Returns the category and the
/// remaining lines starting at the header.
fn skip_preamble(text: &str) -> (Option<String>, Vec<(usize, &str)>) {
    let text = text.strip_prefix('\u{feff}').unwrap_or(text);
    let mut category = None;
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim_end_matches('\r')))
        .peekable();
    while let Some((_, line)) = lines.peek() {
        if line.trim().is_empty() {
            lines.next();
        } else if let Some(rest) = line.strip_prefix("Category:") {
            category = Some(rest.trim().to_owned());
            lines.next();
        } else {
            break;
        }
    }
    (category, lines.collect())
}

pub fn parse_interest_over_time_csv(text: &str) -> Result<TrendsTimeCsv> {
    let (category, lines) = skip_preamble(text);
    let Some(&(header_no, header)) = lines.first() else {
        return Err(Error::parse(text.lines().count().max(1), "missing header"));
    };
    let (column, label) = header
        .split_once(',')
        .ok_or_else(|| Error::parse(header_no, format!("malformed header `{header}`")))?;
    let step = match column.trim() {
        "Day" => Step::Daily,
        "Week" => Step::Weekly,
        other => {
            return Err(Error::parse(
                header_no,
                format!("expected `Day` or `Week` column, found `{other}`"),
            ))
        }
    };
    let (keyword, place) = split_series_label(label)
        .ok_or_else(|| Error::parse(header_no, format!("malformed series label `{label}`")))?;
    let geo = resolve_geo(place)
        .ok_or_else(|| Error::parse(header_no, format!("unknown location `{place}`")))?;

    let mut start = None;
    let mut raw_values = Vec::new();
    for &(no, line) in &lines[1..] {
        if line.trim().is_empty() {
            continue;
        }
        let (date, cell) = line
            .split_once(',')
            .ok_or_else(|| Error::parse(no, format!("expected `date,value`, found `{line}`")))?;
        let date = NaiveDate::parse_from_str(date.trim(), "%Y-%m-%d")
            .map_err(|e| Error::parse(no, format!("bad date `{date}`: {e}")))?;
        let value = RawValue::parse(cell).map_err(Error::InvalidValue)?;

        let start = *start.get_or_insert(date);
        let expected = start + chrono::Duration::days(raw_values.len() as i64 * step.days());
        if date != expected {
            return Err(Error::GridMismatch(format!(
                "line {no}: expected {expected} for a {step} grid, found {date}"
            )));
        }
        raw_values.push(value);
    }
    let start = start.ok_or_else(|| Error::parse(header_no, "no data rows"))?;

    Ok(TrendsTimeCsv {
        category,
        keyword: keyword.to_owned(),
        geo,
        grid: DateGrid::new(start, step, raw_values.len())?,
        raw_values,
    })
}

/// Per-country interest for one time window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionSnapshot {
    pub keyword: String,
    pub start: NaiveDate,
    pub end: NaiveDate,
    /// Geo code → RSV, rescaled so the window maximum is 100.
    pub values: BTreeMap<String, f64>,
    /// Rows that could not be resolved to a location.
    #[serde(default)]
    pub warnings: Vec<String>,
}

impl RegionSnapshot {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// The location with the highest interest (ties go to the smallest code).
    pub fn dominant(&self) -> Option<(&str, f64)> {
        self.values
            .iter()
            .fold(None, |best: Option<(&str, f64)>, (g, v)| match best {
                Some((_, bv)) if bv >= *v => best,
                _ => Some((g.as_str(), *v)),
            })
    }
}

/// Split one CSV record of two fields, honouring double quotes.
fn split_two(line: &str) -> Option<(String, &str)> {
    if let Some(rest) = line.strip_prefix('"') {
        let mut name = String::new();
        let mut chars = rest.char_indices();
        while let Some((i, c)) = chars.next() {
            if c == '"' {
                if rest[i + 1..].starts_with('"') {
                    name.push('"');
                    chars.next();
                } else {
                    let tail = rest[i + 1..].strip_prefix(',')?;
                    return Some((name, tail));
                }
            } else {
                name.push(c);
            }
        }
        None
    } else {
        let (a, b) = line.rsplit_once(',')?;
        Some((a.to_owned(), b))
    }
}

pub fn parse_interest_by_region_csv(
    text: &str,
    window: (NaiveDate, NaiveDate),
) -> Result<RegionSnapshot> {
    let (start, end) = window;
    if start > end {
        return Err(Error::InvalidValue(format!(
            "window start {start} is after end {end}"
        )));
    }
    let (_, lines) = skip_preamble(text);
    let Some(&(header_no, header)) = lines.first() else {
        return Err(Error::parse(text.lines().count().max(1), "missing header"));
    };
    let (_, label) = header
        .split_once(',')
        .ok_or_else(|| Error::parse(header_no, format!("malformed header `{header}`")))?;
    let (keyword, _) = split_series_label(label)
        .ok_or_else(|| Error::parse(header_no, format!("malformed series label `{label}`")))?;

    let mut raw = BTreeMap::new();
    let mut warnings = Vec::new();
    for &(no, line) in &lines[1..] {
        if line.trim().is_empty() {
            continue;
        }
        let (name, cell) = split_two(line)
            .ok_or_else(|| Error::parse(no, format!("expected `region,value`, found `{line}`")))?;
        if cell.trim().is_empty() {
            warnings.push(format!("line {no}: `{name}` has no value"));
            continue;
        }
        let value = RawValue::parse(cell).map_err(Error::InvalidValue)?;
        match regions::resolve(&name) {
            Resolution::Code(code) => {
                if raw.insert(code.to_owned(), value.as_f64()).is_some() {
                    warnings.push(format!("line {no}: `{name}` repeats {code}"));
                }
            }
            Resolution::Unknown => warnings.push(format!("line {no}: unknown region `{name}`")),
            Resolution::Ambiguous(codes) => warnings.push(format!(
                "line {no}: ambiguous region `{name}` ({})",
                codes.join(", ")
            )),
        }
    }
    if raw.is_empty() {
        return Err(Error::parse(header_no, "no parseable region rows"));
    }

    let (geos, values): (Vec<String>, Vec<f64>) = raw.into_iter().unzip();
    let values = normalize_rsv(&values)?;
    Ok(RegionSnapshot {
        keyword: keyword.to_owned(),
        start,
        end,
        values: geos.into_iter().zip(values).collect(),
        warnings,
    })
}

/// Serialize region rows in the export dialect, largest value first.
pub fn region_csv(
    keyword: &str,
    window: (NaiveDate, NaiveDate),
    rows: &[(String, RawValue)],
) -> String {
    let mut out = String::from("Category: All categories\n\n");
    writeln!(
        out,
        "Country,{keyword}: ({} - {})",
        window.0.format("%-m/%-d/%y"),
        window.1.format("%-m/%-d/%y")
    )
    .unwrap();
    let mut rows = rows.to_vec();
    rows.sort_by(|a, b| {
        b.1.as_f64()
            .total_cmp(&a.1.as_f64())
            .then_with(|| a.0.cmp(&b.0))
    });
    for (geo, v) in rows {
        let name = regions::display_name(&geo).unwrap_or(&geo);
        if name.contains(',') {
            writeln!(out, "\"{}\",{v}", name.replace('"', "\"\"")).unwrap();
        } else {
            writeln!(out, "{name},{v}").unwrap();
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(s: &str) -> NaiveDate {
        s.parse().unwrap()
    }

    #[test]
    fn parses_minimal_daily_document() {
        let doc = "Category: All categories\n\nDay,coronavirus: (Worldwide)\n2020-01-01,0\n2020-01-02,45\n2020-01-03,100\n";
        let t = parse_interest_over_time_csv(doc).unwrap();
        assert_eq!(t.grid.len(), 3);
        assert_eq!(t.geo, "WORLD");
        assert_eq!(t.keyword, "coronavirus");
        assert_eq!(t.category.as_deref(), Some("All categories"));
        assert_eq!(t.values(), [0.0, 45.0, 100.0]);
        assert_eq!(t.to_csv(), doc);
    }

    #[test]
    fn below_one_cell() {
        let doc = "Day,coronavirus: (Italy)\r\n2020-01-01,<1\r\n2020-01-02,3\r\n";
        let t = parse_interest_over_time_csv(doc).unwrap();
        assert_eq!(t.geo, "IT");
        assert_eq!(t.values(), [0.5, 3.0]);
        assert_eq!(t.raw_values[0], RawValue::BelowOne);
        assert!(t.to_csv().contains("2020-01-01,<1\n"));
        assert_eq!(parse_interest_over_time_csv(&t.to_csv()).unwrap(), t);
    }

    #[test]
    fn weekly_grid() {
        let doc = "Week,flu: (US)\n2020-01-05,10\n2020-01-12,20\n2020-01-19,30\n";
        let t = parse_interest_over_time_csv(doc).unwrap();
        assert_eq!(t.grid.step(), Step::Weekly);
        assert_eq!(t.grid.end(), d("2020-01-19"));
    }

    #[test]
    fn parse_errors() {
        let bad_header = "Category: All categories\n\nDate;coronavirus\n2020-01-01,1\n";
        assert!(matches!(
            parse_interest_over_time_csv(bad_header),
            Err(Error::Parse { line: 3, .. })
        ));
        let gap = "Day,k: (US)\n2020-01-01,1\n2020-01-03,2\n";
        assert!(matches!(
            parse_interest_over_time_csv(gap),
            Err(Error::GridMismatch(_))
        ));
        let backwards = "Day,k: (US)\n2020-01-02,1\n2020-01-01,2\n";
        assert!(matches!(
            parse_interest_over_time_csv(backwards),
            Err(Error::GridMismatch(_))
        ));
        let big = "Day,k: (US)\n2020-01-01,101\n";
        assert!(matches!(
            parse_interest_over_time_csv(big),
            Err(Error::InvalidValue(_))
        ));
        let neg = "Day,k: (US)\n2020-01-01,-1\n";
        assert!(matches!(
            parse_interest_over_time_csv(neg),
            Err(Error::InvalidValue(_))
        ));
        let junk = "Day,k: (US)\n2020-01-01,1\nnot a row\n";
        assert!(matches!(
            parse_interest_over_time_csv(junk),
            Err(Error::Parse { line: 3, .. })
        ));
        let empty = "Day,k: (US)\n";
        assert!(matches!(
            parse_interest_over_time_csv(empty),
            Err(Error::Parse { .. })
        ));
    }

    #[test]
    fn crop_keeps_dates() {
        let doc = "Day,k: (US)\n2020-01-01,1\n2020-01-02,2\n2020-01-03,3\n";
        let t = parse_interest_over_time_csv(doc).unwrap();
        let c = t.crop(d("2020-01-02"), d("2020-01-03")).unwrap();
        assert_eq!(c.values(), [2.0, 3.0]);
        assert!(t.crop(d("2019-12-31"), d("2020-01-03")).is_err());
    }

    const WINDOW: (&str, &str) = ("2020-01-01", "2020-01-07");

    fn window() -> (NaiveDate, NaiveDate) {
        (d(WINDOW.0), d(WINDOW.1))
    }

    #[test]
    fn region_rows() {
        let doc = "Category: All categories\n\nCountry,coronavirus: (1/1/20 - 1/7/20)\nUnited States,100\nItaly,85\nSingapore,40\n";
        let s = parse_interest_by_region_csv(doc, window()).unwrap();
        assert_eq!(s.len(), 3);
        assert_eq!(s.values["US"], 100.0);
        assert_eq!(s.values["SG"], 40.0);
        assert_eq!(s.dominant(), Some(("US", 100.0)));
        assert!(s.warnings.is_empty());
    }

    #[test]
    fn region_unknown_and_blank_rows() {
        let doc = "Country,coronavirus: (1/1/20 - 1/7/20)\nItaly,50\nAtlantis,30\n\"Korea, South\",<1\nNepal,\n";
        let s = parse_interest_by_region_csv(doc, window()).unwrap();
        assert_eq!(s.values.keys().collect::<Vec<_>>(), ["IT", "KR"]);
        // renormalised per window
        assert_eq!(s.values["IT"], 100.0);
        assert_eq!(s.values["KR"], 1.0);
        assert_eq!(s.warnings.len(), 2);
        assert!(s.warnings.iter().any(|w| w.contains("Atlantis")));
    }

    #[test]
    fn region_errors() {
        let none = "Country,coronavirus: (1/1/20 - 1/7/20)\nAtlantis,30\n";
        assert!(matches!(
            parse_interest_by_region_csv(none, window()),
            Err(Error::Parse { .. })
        ));
        assert!(parse_interest_by_region_csv(
            "Country,k: (x)\nItaly,1\n",
            (d("2020-02-01"), d("2020-01-01"))
        )
        .is_err());
    }

    #[test]
    fn region_writer_round_trips() {
        let rows = vec![
            ("SG".to_string(), RawValue::Value(40)),
            ("KR".to_string(), RawValue::BelowOne),
            ("CN".to_string(), RawValue::Value(100)),
        ];
        let doc = region_csv("coronavirus", window(), &rows);
        assert!(doc.contains(
            "Country,coronavirus: (1/1/20 - 1/7/20)\nChina,100\nSingapore,40\nSouth Korea,<1\n"
        ));
        let s = parse_interest_by_region_csv(&doc, window()).unwrap();
        assert_eq!(s.values["KR"], 0.5);
    }
}
