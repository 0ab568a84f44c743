//! Annual time series, aligned datasets and regressor assembly.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::Matrix;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SeriesError {
    #[error("series `{0}` is empty")]
    Empty(String),
    #[error("series `{name}` has a non-finite value in {year}")]
    NonFinite { name: String, year: i32 },
    #[error("series `{name}` has a non-positive value in {year}; logs are undefined")]
    NonPositiveValue { name: String, year: i32 },
    #[error("series `{name}` is too short: {len} observations, need more than {needed}")]
    TooShort { name: String, len: usize, needed: usize },
    #[error("year ranges do not overlap")]
    EmptyIntersection,
    #[error("dataset has no series")]
    NoSeries,
    #[error("duplicate series name `{0}`")]
    DuplicateName(String),
    #[error("series `{name}` covers {start}-{end}, dataset covers {dataset_start}-{dataset_end}")]
    RangeMismatch {
        name: String,
        start: i32,
        end: i32,
        dataset_start: i32,
        dataset_end: i32,
    },
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("lag specification has {got} entries for {expected} variables")]
    LagSpecMismatch { expected: usize, got: usize },
}

/// Named annual series; observation `i` belongs to `start_year + i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Series {
    name: String,
    start_year: i32,
    values: Vec<f64>,
}

impl Series {
    pub fn new(name: impl Into<String>, start_year: i32, values: Vec<f64>) -> Result<Self, SeriesError> {
        let name = name.into();
        if values.is_empty() {
            return Err(SeriesError::Empty(name));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(SeriesError::NonFinite {
                name,
                year: start_year + i as i32,
            });
        }
        Ok(Series {
            name,
            start_year,
            values,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn start_year(&self) -> i32 {
        self.start_year
    }

    pub fn end_year(&self) -> i32 {
        self.start_year + self.values.len() as i32 - 1
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn year_of(&self, index: usize) -> i32 {
        self.start_year + index as i32
    }

    pub fn years(&self) -> impl Iterator<Item = i32> + '_ {
        (0..self.values.len()).map(|i| self.year_of(i))
    }

    pub fn renamed(&self, name: impl Into<String>) -> Series {
        Series {
            name: name.into(),
            ..self.clone()
        }
    }

    /// Natural log of every value; the result is named `l_<name>`.
    pub fn log_transform(&self) -> Result<Series, SeriesError> {
        if let Some(i) = self.values.iter().position(|v| *v <= 0.0) {
            return Err(SeriesError::NonPositiveValue {
                name: self.name.clone(),
                year: self.year_of(i),
            });
        }
        Ok(Series {
            name: format!("l_{}", self.name),
            start_year: self.start_year,
            values: self.values.iter().map(|v| v.ln()).collect(),
        })
    }

    /// `order`-th difference. The first `order` years are dropped.
    pub fn difference(&self, order: usize) -> Result<Series, SeriesError> {
        if self.values.len() <= order {
            return Err(SeriesError::TooShort {
                name: self.name.clone(),
                len: self.values.len(),
                needed: order,
            });
        }
        let mut values = self.values.clone();
        for _ in 0..order {
            values = values.windows(2).map(|w| w[1] - w[0]).collect();
        }
        Ok(Series {
            name: self.name.clone(),
            start_year: self.start_year + order as i32,
            values,
        })
    }

    /// Sub-series covering `start..=end`, which must lie inside the series.
    fn slice_years(&self, start: i32, end: i32) -> Series {
        let from = (start - self.start_year) as usize;
        let to = (end - self.start_year) as usize;
        Series {
            name: self.name.clone(),
            start_year: start,
            values: self.values[from..=to].to_vec(),
        }
    }
}

/// Series sharing one year range, with unique names.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    series: Vec<Series>,
    start_year: i32,
    end_year: i32,
}

impl Dataset {
    pub fn new(series: Vec<Series>) -> Result<Self, SeriesError> {
        let first = series.first().ok_or(SeriesError::NoSeries)?;
        let (start_year, end_year) = (first.start_year(), first.end_year());
        let mut names = HashSet::new();
        for s in &series {
            if !names.insert(s.name()) {
                return Err(SeriesError::DuplicateName(s.name().to_string()));
            }
            if s.start_year() != start_year || s.end_year() != end_year {
                return Err(SeriesError::RangeMismatch {
                    name: s.name().to_string(),
                    start: s.start_year(),
                    end: s.end_year(),
                    dataset_start: start_year,
                    dataset_end: end_year,
                });
            }
        }
        Ok(Dataset {
            series,
            start_year,
            end_year,
        })
    }

    pub fn series(&self) -> &[Series] {
        &self.series
    }

    pub fn into_series(self) -> Vec<Series> {
        self.series
    }

    pub fn start_year(&self) -> i32 {
        self.start_year
    }

    pub fn end_year(&self) -> i32 {
        self.end_year
    }

    /// Number of observations per series.
    pub fn len(&self) -> usize {
        (self.end_year - self.start_year + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        self.series.is_empty()
    }

    pub fn dimension(&self) -> usize {
        self.series.len()
    }

    pub fn names(&self) -> Vec<&str> {
        self.series.iter().map(Series::name).collect()
    }

    pub fn get(&self, name: &str) -> Option<&Series> {
        self.series.iter().find(|s| s.name() == name)
    }

    /// Keeps `names` in the given order.
    pub fn select(&self, names: &[&str]) -> Result<Dataset, SeriesError> {
        let series = names
            .iter()
            .map(|n| {
                self.get(n)
                    .cloned()
                    .ok_or_else(|| SeriesError::UnknownVariable(n.to_string()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Dataset::new(series)
    }

    /// Restricts every series to `start..=end`, which must overlap the dataset;
    /// bounds outside the dataset are clamped.
    pub fn window(&self, start: i32, end: i32) -> Result<Dataset, SeriesError> {
        let from = start.max(self.start_year());
        let to = end.min(self.end_year());
        if from > to {
            return Err(SeriesError::EmptyIntersection);
        }
        Dataset::new(self.series.iter().map(|s| s.slice_years(from, to)).collect())
    }

    /// Observations as a `len × dimension` matrix.
    pub fn to_matrix(&self) -> Matrix {
        Matrix::from_fn(self.len(), self.dimension(), |i, j| self.series[j].values[i])
    }

    pub fn map_series(
        &self,
        f: impl Fn(&Series) -> Result<Series, SeriesError>,
    ) -> Result<Dataset, SeriesError> {
        Dataset::new(self.series.iter().map(f).collect::<Result<Vec<_>, _>>()?)
    }
}

impl fmt::Display for Dataset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} series, {}-{} ({} obs): {}",
            self.dimension(),
            self.start_year,
            self.end_year,
            self.len(),
            self.names().join(", ")
        )
    }
}

/// Truncates every series to the common year range.
pub fn align(series: &[Series]) -> Result<Dataset, SeriesError> {
    if series.is_empty() {
        return Err(SeriesError::NoSeries);
    }
    let start = series.iter().map(Series::start_year).max().unwrap();
    let end = series.iter().map(Series::end_year).min().unwrap();
    if start > end {
        return Err(SeriesError::EmptyIntersection);
    }
    Dataset::new(series.iter().map(|s| s.slice_years(start, end)).collect())
}

/// Deterministic regressors appended after the stochastic columns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Deterministics {
    None,
    Constant,
    ConstantTrend,
}

impl Deterministics {
    pub fn count(self) -> usize {
        match self {
            Deterministics::None => 0,
            Deterministics::Constant => 1,
            Deterministics::ConstantTrend => 2,
        }
    }

    pub fn has_constant(self) -> bool {
        self != Deterministics::None
    }
}

impl fmt::Display for Deterministics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Deterministics::None => "none",
            Deterministics::Constant => "constant",
            Deterministics::ConstantTrend => "constant+trend",
        })
    }
}

/// Which lags of each variable enter a [`LagMatrix`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LagSpec {
    /// Highest lag per variable, in dataset order.
    pub max_lags: Vec<usize>,
    /// Include lag 0 (the contemporaneous value).
    pub include_current: bool,
    /// Rows to drop from the start; defaults to the largest lag. A larger
    /// trim holds the sample fixed while comparing lag orders.
    pub trim: Option<usize>,
}

impl LagSpec {
    pub fn uniform(variables: usize, lags: usize) -> Self {
        LagSpec {
            max_lags: vec![lags; variables],
            include_current: true,
            trim: None,
        }
    }

    pub fn lagged_only(variables: usize, lags: usize) -> Self {
        LagSpec {
            include_current: false,
            ..LagSpec::uniform(variables, lags)
        }
    }

    pub fn with_trim(mut self, trim: usize) -> Self {
        self.trim = Some(trim);
        self
    }

    fn effective_trim(&self) -> usize {
        let max = self.max_lags.iter().copied().max().unwrap_or(0);
        self.trim.map_or(max, |t| t.max(max))
    }
}

/// Regressor matrix with one label per column.
#[derive(Debug, Clone, PartialEq)]
pub struct LagMatrix {
    labels: Vec<String>,
    values: Matrix,
}

impl LagMatrix {
    pub fn new(labels: Vec<String>, values: Matrix) -> Self {
        assert_eq!(labels.len(), values.ncols(), "one label per column");
        LagMatrix { labels, values }
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn values(&self) -> &Matrix {
        &self.values
    }

    pub fn rows(&self) -> usize {
        self.values.nrows()
    }

    pub fn cols(&self) -> usize {
        self.values.ncols()
    }

    /// Appends columns on the right.
    pub fn hstack(&self, other: &LagMatrix) -> LagMatrix {
        assert_eq!(self.rows(), other.rows());
        let mut labels = self.labels.clone();
        labels.extend(other.labels.iter().cloned());
        let (a, b) = (self.cols(), other.cols());
        let values = Matrix::from_fn(self.rows(), a + b, |i, j| {
            if j < a {
                self.values[(i, j)]
            } else {
                other.values[(i, j - a)]
            }
        });
        LagMatrix { labels, values }
    }
}

pub fn lag_label(name: &str, lag: usize) -> String {
    if lag == 0 {
        name.to_string()
    } else {
        format!("{name}(-{lag})")
    }
}

/// Deterministic columns for `rows` observations: constant then trend `1..=rows`.
pub fn deterministic_columns(rows: usize, det: Deterministics) -> LagMatrix {
    let mut labels = Vec::new();
    let mut columns = Vec::new();
    if det.has_constant() {
        labels.push("C".to_string());
        columns.push(vec![1.0; rows]);
    }
    if det == Deterministics::ConstantTrend {
        labels.push("@TREND".to_string());
        columns.push((1..=rows).map(|t| t as f64).collect());
    }
    columns_to_lag_matrix(rows, labels, &columns)
}

fn columns_to_lag_matrix(rows: usize, labels: Vec<String>, columns: &[Vec<f64>]) -> LagMatrix {
    let values = Matrix::from_fn(rows, columns.len(), |i, j| columns[j][i]);
    LagMatrix::new(labels, values)
}

/// Lagged regressors for every variable over the overlapping sample.
///
/// Rows are observations `trim..len`; row `i` holds `x_{trim+i-lag}` for each
/// requested lag. Columns are grouped by lag (all variables at lag 0, then
/// lag 1, ...), and deterministic columns come last.
pub fn lag_matrix(d: &Dataset, lags: &LagSpec, det: Deterministics) -> Result<LagMatrix, SeriesError> {
    if lags.max_lags.len() != d.dimension() {
        return Err(SeriesError::LagSpecMismatch {
            expected: d.dimension(),
            got: lags.max_lags.len(),
        });
    }
    let trim = lags.effective_trim();
    let len = d.len();
    if trim >= len {
        return Err(SeriesError::TooShort {
            name: d.names().join(","),
            len,
            needed: trim,
        });
    }
    let rows = len - trim;
    let first = if lags.include_current { 0 } else { 1 };
    let top = lags.max_lags.iter().copied().max().unwrap_or(0);
    let mut labels = Vec::new();
    let mut columns = Vec::new();
    for lag in first..=top {
        for (s, &max) in d.series().iter().zip(&lags.max_lags) {
            if lag > max {
                continue;
            }
            labels.push(lag_label(s.name(), lag));
            columns.push(s.values()[trim - lag..len - lag].to_vec());
        }
    }
    Ok(columns_to_lag_matrix(rows, labels, &columns).hstack(&deterministic_columns(rows, det)))
}
