//! Tie-aware Spearman rank correlation and the pairwise matrix over a panel.

use std::fmt::Write as _;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::timeseries::Panel;

/// 1-based ranks; tied values share the mean of the positions they span.
pub fn average_ranks(values: &[f64]) -> Result<Vec<f64>> {
    if values.is_empty() {
        return Err(Error::EmptySeries);
    }
    if let Some(v) = values.iter().find(|v| !v.is_finite()) {
        return Err(Error::InvalidValue(format!("{v} cannot be ranked")));
    }
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));

    let mut ranks = vec![0.0; values.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == values[order[start]] {
            end += 1;
        }
        // positions start+1 ..= end share their mean
        let rank = (start + 1 + end) as f64 / 2.0;
        for &idx in &order[start..end] {
            ranks[idx] = rank;
        }
        start = end;
    }
    Ok(ranks)
}

/// Pearson correlation of two rank vectors, or `None` if either is constant.
fn pearson_of_ranks(rx: &[f64], ry: &[f64]) -> Option<f64> {
    let mean = (rx.len() + 1) as f64 / 2.0;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in rx.iter().zip(ry) {
        let (dx, dy) = (a - mean, b - mean);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Spearman's rho: Pearson correlation of the average ranks.
pub fn spearman_rho(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::GridMismatch(format!(
            "series lengths differ ({} vs {})",
            x.len(),
            y.len()
        )));
    }
    if x.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "spearman needs at least 3 observations, got {}",
            x.len()
        )));
    }
    let rx = average_ranks(x)?;
    let ry = average_ranks(y)?;
    pearson_of_ranks(&rx, &ry).ok_or_else(|| Error::ZeroVariance {
        geo: if rx.iter().all(|r| *r == rx[0]) {
            "x"
        } else {
            "y"
        }
        .into(),
    })
}

/// What to do with a series that never changes over the grid.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConstantPolicy {
    #[default]
    Error,
    Drop,
}

impl FromStr for ConstantPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "error" => Ok(ConstantPolicy::Error),
            "drop" => Ok(ConstantPolicy::Drop),
            other => Err(Error::InvalidValue(format!(
                "unknown constant policy `{other}`"
            ))),
        }
    }
}

/// Symmetric matrix of pairwise Spearman coefficients with unit diagonal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MatrixRepr")]
pub struct CorrelationMatrix {
    method: String,
    labels: Vec<String>,
    /// Row-major, `labels.len()²` entries.
    values: Vec<f64>,
}

#[derive(Deserialize)]
struct MatrixRepr {
    method: String,
    labels: Vec<String>,
    values: Vec<f64>,
}

impl TryFrom<MatrixRepr> for CorrelationMatrix {
    type Error = Error;

    fn try_from(r: MatrixRepr) -> Result<Self> {
        let m = CorrelationMatrix {
            method: r.method,
            labels: r.labels,
            values: r.values,
        };
        m.validate()?;
        Ok(m)
    }
}

impl CorrelationMatrix {
    /// Build from labels and a full row-major matrix, checking invariants.
    pub fn from_rows(labels: Vec<String>, rows: Vec<Vec<f64>>) -> Result<Self> {
        if rows.len() != labels.len() || rows.iter().any(|r| r.len() != labels.len()) {
            return Err(Error::InvalidMatrix(format!(
                "expected a {n}×{n} matrix",
                n = labels.len()
            )));
        }
        let m = CorrelationMatrix {
            method: "spearman".into(),
            labels,
            values: rows.into_iter().flatten().collect(),
        };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.labels.len();
        if self.values.len() != n * n {
            return Err(Error::InvalidMatrix(format!(
                "{} values for {n} labels",
                self.values.len()
            )));
        }
        let mut seen = std::collections::HashSet::new();
        if let Some(dup) = self.labels.iter().find(|l| !seen.insert(*l)) {
            return Err(Error::DuplicateLocation(dup.clone()));
        }
        for i in 0..n {
            if self.get(i, i) != 1.0 {
                return Err(Error::InvalidMatrix(format!(
                    "diagonal entry for `{}` is {}",
                    self.labels[i],
                    self.get(i, i)
                )));
            }
            for j in 0..i {
                let v = self.get(i, j);
                if !v.is_finite() || v.abs() > 1.0 + 1e-12 {
                    return Err(Error::InvalidMatrix(format!(
                        "entry ({}, {}) = {v} is outside [-1, 1]",
                        self.labels[i], self.labels[j]
                    )));
                }
                if v.to_bits() != self.get(j, i).to_bits() {
                    return Err(Error::InvalidMatrix(format!(
                        "entries for ({}, {}) are not symmetric",
                        self.labels[i], self.labels[j]
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn method(&self) -> &str {
        &self.method
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.labels.len() + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let n = self.labels.len();
        &self.values[i * n..(i + 1) * n]
    }

    pub fn index_of(&self, geo: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == geo)
    }

    /// CSV with a header row of labels and one labeled row per location.
    /// Values use the shortest representation that round-trips exactly.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("geo");
        for l in &self.labels {
            out.push(',');
            out.push_str(l);
        }
        out.push('\n');
        for (i, l) in self.labels.iter().enumerate() {
            out.push_str(l);
            for v in self.row(i) {
                write!(out, ",{v:?}").unwrap();
            }
            out.push('\n');
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        let (_, header) = lines
            .next()
            .ok_or_else(|| Error::parse(1, "empty document"))?;
        let labels: Vec<String> = header.split(',').skip(1).map(str::to_owned).collect();
        let mut rows = Vec::with_capacity(labels.len());
        for (no, line) in lines.filter(|(_, l)| !l.is_empty()) {
            let mut cells = line.split(',');
            let label = cells.next().unwrap_or_default();
            if labels.get(rows.len()).map(String::as_str) != Some(label) {
                return Err(Error::parse(
                    no + 1,
                    format!("unexpected row label `{label}`"),
                ));
            }
            let row = cells
                .map(|c| {
                    c.parse::<f64>()
                        .map_err(|e| Error::parse(no + 1, format!("`{c}`: {e}")))
                })
                .collect::<Result<Vec<_>>>()?;
            rows.push(row);
        }
        Self::from_rows(labels, rows)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("matrix serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// Spearman correlation of every pair of panel series.
///
/// Each unordered pair is computed once and mirrored, so the result is
/// exactly symmetric regardless of how the pairs are scheduled.
pub fn correlation_matrix(panel: &Panel, policy: ConstantPolicy) -> Result<CorrelationMatrix> {
    if panel.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "correlation needs at least 2 series, got {}",
            panel.len()
        )));
    }
    if panel.grid().len() < 3 {
        return Err(Error::InsufficientData(format!(
            "correlation needs a grid of at least 3 points, got {}",
            panel.grid().len()
        )));
    }

    let mut labels = Vec::with_capacity(panel.len());
    let mut ranks = Vec::with_capacity(panel.len());
    for s in panel.series() {
        let r = average_ranks(s.values())?;
        if r.iter().all(|v| *v == r[0]) {
            match policy {
                ConstantPolicy::Error => {
                    return Err(Error::ZeroVariance {
                        geo: s.geo().to_owned(),
                    })
                }
                ConstantPolicy::Drop => continue,
            }
        }
        labels.push(s.geo().to_owned());
        ranks.push(r);
    }
    let n = labels.len();
    if n < 2 {
        return Err(Error::InsufficientData(format!(
            "only {n} non-constant series remain"
        )));
    }

    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .collect();
    let rhos: Vec<f64> = pairs
        .par_iter()
        .map(|&(i, j)| pearson_of_ranks(&ranks[i], &ranks[j]).expect("variance checked above"))
        .collect();

    let mut values = vec![0.0; n * n];
    for i in 0..n {
        values[i * n + i] = 1.0;
    }
    for (&(i, j), &rho) in pairs.iter().zip(&rhos) {
        values[i * n + j] = rho;
        values[j * n + i] = rho;
    }
    Ok(CorrelationMatrix {
        method: "spearman".into(),
        labels,
        values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::timeseries::{align_panel, DateGrid, LocationSeries, Step};
    use proptest::prelude::*;

    #[test]
    fn rank_examples() {
        assert_eq!(average_ranks(&[10.0, 20.0, 30.0]).unwrap(), [1.0, 2.0, 3.0]);
        assert_eq!(average_ranks(&[5.0, 5.0, 5.0]).unwrap(), [2.0, 2.0, 2.0]);
        assert_eq!(
            average_ranks(&[3.0, 1.0, 4.0, 1.0]).unwrap(),
            [3.0, 1.5, 4.0, 1.5]
        );
        assert!(matches!(
            average_ranks(&[1.0, f64::NAN]),
            Err(Error::InvalidValue(_))
        ));
    }

    #[test]
    fn rho_extremes() {
        let x = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(spearman_rho(&x, &[10.0, 20.0, 30.0, 40.0]).unwrap(), 1.0);
        assert_eq!(spearman_rho(&x, &[40.0, 30.0, 20.0, 10.0]).unwrap(), -1.0);
    }

    #[test]
    fn rho_errors() {
        assert!(matches!(
            spearman_rho(&[1.0, 2.0, 3.0], &[1.0, 2.0]),
            Err(Error::GridMismatch(_))
        ));
        assert!(matches!(
            spearman_rho(&[1.0, 2.0], &[1.0, 2.0]),
            Err(Error::InsufficientData(_))
        ));
        assert!(matches!(
            spearman_rho(&[1.0, 2.0, 3.0], &[4.0, 4.0, 4.0]),
            Err(Error::ZeroVariance { .. })
        ));
    }

    fn panel(columns: &[(&str, Vec<f64>)]) -> Panel {
        let len = columns[0].1.len();
        let grid = DateGrid::new("2020-01-20".parse().unwrap(), Step::Daily, len).unwrap();
        align_panel(
            columns
                .iter()
                .map(|(g, v)| LocationSeries::new(*g, "coronavirus", grid, v.clone()).unwrap()),
        )
        .unwrap()
    }

    #[test]
    fn duplicated_series_correlate_perfectly() {
        let v = vec![3.0, 9.0, 1.0, 40.0, 40.0, 7.0];
        let m = correlation_matrix(
            &panel(&[("AA", v.clone()), ("BB", v)]),
            ConstantPolicy::Error,
        )
        .unwrap();
        assert_eq!(m.get(0, 1), 1.0);
        assert_eq!(m.get(1, 0), 1.0);
    }

    #[test]
    fn constant_series_policy() {
        let p = panel(&[
            ("AA", vec![1.0, 2.0, 3.0, 4.0]),
            ("BB", vec![50.0; 4]),
            ("CC", vec![4.0, 1.0, 3.0, 2.0]),
        ]);
        let err = correlation_matrix(&p, ConstantPolicy::Error).unwrap_err();
        assert!(matches!(err, Error::ZeroVariance { geo } if geo == "BB"));

        let m = correlation_matrix(&p, ConstantPolicy::Drop).unwrap();
        assert_eq!(m.labels(), ["AA", "CC"]);
    }

    #[test]
    fn csv_and_json_round_trip() {
        let p = panel(&[
            ("AA", vec![1.0, 2.0, 3.0, 4.0, 5.0]),
            ("BB", vec![2.0, 1.0, 4.0, 3.0, 5.0]),
            ("CC", vec![5.0, 3.0, 4.0, 1.0, 2.0]),
        ]);
        let m = correlation_matrix(&p, ConstantPolicy::Error).unwrap();
        assert_eq!(CorrelationMatrix::from_csv(&m.to_csv()).unwrap(), m);
        assert_eq!(CorrelationMatrix::from_json(&m.to_json()).unwrap(), m);
        assert!(m.to_csv().starts_with("geo,AA,BB,CC\nAA,1.0,"));
    }

    #[test]
    fn rejects_bad_matrices() {
        let labels = vec!["A".to_string(), "B".to_string()];
        assert!(
            CorrelationMatrix::from_rows(labels.clone(), vec![vec![1.0, 0.5], vec![0.4, 1.0]])
                .is_err()
        );
        assert!(
            CorrelationMatrix::from_rows(labels.clone(), vec![vec![0.9, 0.5], vec![0.5, 1.0]])
                .is_err()
        );
        assert!(
            CorrelationMatrix::from_rows(labels, vec![vec![1.0, 1.5], vec![1.5, 1.0]]).is_err()
        );
    }

    proptest! {
        #[test]
        fn rho_is_symmetric_and_bounded(
            pairs in prop::collection::vec((0u8..20, 0u8..20), 3..80)
        ) {
            let x: Vec<f64> = pairs.iter().map(|p| p.0 as f64).collect();
            let y: Vec<f64> = pairs.iter().map(|p| p.1 as f64).collect();
            match (spearman_rho(&x, &y), spearman_rho(&y, &x)) {
                (Ok(a), Ok(b)) => {
                    prop_assert_eq!(a.to_bits(), b.to_bits());
                    prop_assert!(a.abs() <= 1.0 + 1e-12);
                }
                (Err(_), Err(_)) => {}
                _ => prop_assert!(false),
            }
        }

        #[test]
        fn rank_sum_is_triangular(values in prop::collection::vec(0u8..10, 1..100)) {
            let v: Vec<f64> = values.iter().map(|x| *x as f64).collect();
            let n = v.len() as f64;
            let sum: f64 = average_ranks(&v).unwrap().iter().sum();
            prop_assert_eq!(sum, n * (n + 1.0) / 2.0);
        }
    }
}
