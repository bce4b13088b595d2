//! CSV loading, trading-calendar alignment, log-returns, and reduced
//! (zero-mean unit-variance) series.
//!
//! One CSV per instrument, header row required, ISO-8601 dates by default.
//! A plain-text manifest maps instrument ids to file paths and names the
//! forecast target.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use chrono::NaiveDate;

use crate::{stats, Error, Result};

/// Column mapping for an instrument CSV.
#[derive(Debug, Clone)]
pub struct CsvSchema {
    pub date_column: String,
    pub close_column: String,
    /// chrono format string, ISO-8601 by default.
    pub date_format: String,
}

impl Default for CsvSchema {
    fn default() -> Self {
        CsvSchema {
            date_column: "date".into(),
            close_column: "close".into(),
            date_format: "%Y-%m-%d".into(),
        }
    }
}

/// Daily closing values for one instrument.
///
/// Invariants: dates strictly increasing, closes strictly positive, equal
/// lengths. Immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct PriceSeries {
    instrument_id: String,
    dates: Vec<NaiveDate>,
    closes: Vec<f64>,
}

impl PriceSeries {
    pub fn new(
        instrument_id: impl Into<String>,
        dates: Vec<NaiveDate>,
        closes: Vec<f64>,
    ) -> Result<Self> {
        let instrument_id = instrument_id.into();
        if dates.len() != closes.len() {
            return Err(Error::Shape(format!(
                "{instrument_id}: {} dates but {} closes",
                dates.len(),
                closes.len()
            )));
        }
        for pair in dates.windows(2) {
            if pair[1] <= pair[0] {
                return Err(Error::Integrity(format!(
                    "{instrument_id}: dates not strictly increasing at {}",
                    pair[1]
                )));
            }
        }
        if let Some(bad) = closes.iter().find(|c| !c.is_finite() || **c <= 0.0) {
            return Err(Error::Integrity(format!(
                "{instrument_id}: non-positive close {bad}"
            )));
        }
        Ok(PriceSeries {
            instrument_id,
            dates,
            closes,
        })
    }

    pub fn instrument_id(&self) -> &str {
        &self.instrument_id
    }

    pub fn dates(&self) -> &[NaiveDate] {
        &self.dates
    }

    pub fn closes(&self) -> &[f64] {
        &self.closes
    }

    pub fn len(&self) -> usize {
        self.dates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dates.is_empty()
    }

    /// Same series under a different label (manifest ids override file stems).
    pub fn with_id(mut self, id: impl Into<String>) -> Self {
        self.instrument_id = id.into();
        self
    }

    /// Restrict to `[from, to]`; `None` leaves that side open.
    pub fn restrict(&self, from: Option<NaiveDate>, to: Option<NaiveDate>) -> Result<Self> {
        let keep: Vec<usize> = (0..self.len())
            .filter(|&i| {
                from.is_none_or(|f| self.dates[i] >= f) && to.is_none_or(|t| self.dates[i] <= t)
            })
            .collect();
        if keep.is_empty() {
            return Err(Error::InsufficientData(format!(
                "{}: no observations in the requested date range",
                self.instrument_id
            )));
        }
        PriceSeries::new(
            self.instrument_id.clone(),
            keep.iter().map(|&i| self.dates[i]).collect(),
            keep.iter().map(|&i| self.closes[i]).collect(),
        )
    }
}

/// How [`align`] treats dates missing from some series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FillPolicy {
    /// Keep only dates present in every series (bias-free default).
    Intersection,
    /// Keep the union of dates once every series has started, carrying the
    /// last known close forward. For cross-market panels with different
    /// holiday calendars.
    ForwardFill,
}

/// Date-indexed matrix of closing values on a common trading calendar.
#[derive(Debug, Clone)]
pub struct AlignedPanel {
    dates: Vec<NaiveDate>,
    columns: Vec<(String, Vec<f64>)>,
    fill_policy: FillPolicy,
}

impl AlignedPanel {
    pub fn dates(&self) -> &[NaiveDate] {
        &self.dates
    }

    pub fn columns(&self) -> &[(String, Vec<f64>)] {
        &self.columns
    }

    pub fn fill_policy(&self) -> FillPolicy {
        self.fill_policy
    }

    pub fn n_series(&self) -> usize {
        self.columns.len()
    }

    pub fn n_dates(&self) -> usize {
        self.dates.len()
    }

    pub fn column(&self, id: &str) -> Option<&[f64]> {
        self.columns
            .iter()
            .find(|(name, _)| name == id)
            .map(|(_, v)| v.as_slice())
    }

    pub fn column_index(&self, id: &str) -> Option<usize> {
        self.columns.iter().position(|(name, _)| name == id)
    }

    /// Column as a standalone price series (values stay positive because the
    /// panel was built from positive closes).
    pub fn to_price_series(&self, id: &str) -> Result<PriceSeries> {
        let values = self
            .column(id)
            .ok_or_else(|| Error::Config(format!("panel has no series named '{id}'")))?;
        PriceSeries::new(id, self.dates.clone(), values.to_vec())
    }
}

/// Load one instrument CSV. Rows are sorted ascending by date; duplicate
/// dates and non-positive prices are rejected. The instrument id defaults to
/// the file stem.
pub fn load_csv(path: &Path, schema: &CsvSchema) -> Result<PriceSeries> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| match e.kind() {
            csv::ErrorKind::Io(_) => Error::io(path, std::io::Error::other(e.to_string())),
            _ => Error::Integrity(format!("{}: {e}", path.display())),
        })?;

    let headers = reader
        .headers()
        .map_err(|e| Error::Integrity(format!("{}: {e}", path.display())))?
        .clone();
    let col = |name: &str| -> Result<usize> {
        headers.iter().position(|h| h == name).ok_or_else(|| {
            Error::Integrity(format!(
                "{}: missing column '{name}' (have: {})",
                path.display(),
                headers.iter().collect::<Vec<_>>().join(", ")
            ))
        })
    };
    let date_idx = col(&schema.date_column)?;
    let close_idx = col(&schema.close_column)?;

    let mut rows: Vec<(NaiveDate, f64)> = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let row = i + 1;
        let parse_err = |message: String| Error::Parse {
            path: path.to_path_buf(),
            row,
            message,
        };
        let record = record.map_err(|e| parse_err(e.to_string()))?;
        let date_str = record
            .get(date_idx)
            .ok_or_else(|| parse_err("missing date field".into()))?;
        let close_str = record
            .get(close_idx)
            .ok_or_else(|| parse_err("missing close field".into()))?;
        let date = NaiveDate::parse_from_str(date_str, &schema.date_format)
            .map_err(|e| parse_err(format!("bad date '{date_str}': {e}")))?;
        let close: f64 = close_str
            .parse()
            .map_err(|e| parse_err(format!("bad close '{close_str}': {e}")))?;
        rows.push((date, close));
    }

    rows.sort_by_key(|(d, _)| *d);
    for pair in rows.windows(2) {
        if pair[0].0 == pair[1].0 {
            return Err(Error::Integrity(format!(
                "{}: duplicate date {}",
                path.display(),
                pair[0].0
            )));
        }
    }

    let id = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "series".into());
    let (dates, closes) = rows.into_iter().unzip();
    PriceSeries::new(id, dates, closes)
}

/// Align several series onto one calendar.
pub fn align(series: &[PriceSeries], policy: FillPolicy) -> Result<AlignedPanel> {
    if series.is_empty() {
        return Err(Error::Precondition(
            "align needs at least one series".into(),
        ));
    }
    let dates: Vec<NaiveDate> = match policy {
        FillPolicy::Intersection => {
            let mut common: BTreeSet<NaiveDate> = series[0].dates.iter().copied().collect();
            for s in &series[1..] {
                let own: BTreeSet<NaiveDate> = s.dates.iter().copied().collect();
                common = common.intersection(&own).copied().collect();
            }
            common.into_iter().collect()
        }
        FillPolicy::ForwardFill => {
            // Union of dates, but only once every series has a value to carry.
            let latest_start = series
                .iter()
                .map(|s| s.dates[0])
                .max()
                .expect("nonempty series list");
            let mut union: BTreeSet<NaiveDate> = BTreeSet::new();
            for s in series {
                union.extend(s.dates.iter().copied());
            }
            union.into_iter().filter(|d| *d >= latest_start).collect()
        }
    };
    if dates.is_empty() {
        return Err(Error::Alignment(
            "no common trading dates across the input series".into(),
        ));
    }

    let mut columns = Vec::with_capacity(series.len());
    for s in series {
        let mut values = Vec::with_capacity(dates.len());
        let mut cursor = 0usize;
        let mut last: Option<f64> = None;
        for d in &dates {
            while cursor < s.len() && s.dates[cursor] <= *d {
                last = Some(s.closes[cursor]);
                cursor += 1;
            }
            match (policy, s.dates.binary_search(d).is_ok(), last) {
                (FillPolicy::Intersection, true, _) => {
                    values.push(s.closes[s.dates.binary_search(d).expect("date present")])
                }
                (FillPolicy::Intersection, false, _) => {
                    unreachable!("intersection calendar contains a date missing from an input")
                }
                (FillPolicy::ForwardFill, _, Some(v)) => values.push(v),
                (FillPolicy::ForwardFill, _, None) => {
                    unreachable!("calendar starts before series {}", s.instrument_id)
                }
            }
        }
        columns.push((s.instrument_id.clone(), values));
    }

    Ok(AlignedPanel {
        dates,
        columns,
        fill_policy: policy,
    })
}

/// Log-return series `ln x(i+1) − ln x(i)`, dated by the later price.
#[derive(Debug, Clone)]
pub struct ReturnSeries {
    pub dates: Vec<NaiveDate>,
    pub values: Vec<f64>,
}

pub fn log_returns(prices: &PriceSeries) -> Result<ReturnSeries> {
    if prices.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "{}: need at least 2 prices for returns, have {}",
            prices.instrument_id,
            prices.len()
        )));
    }
    let values = prices
        .closes
        .windows(2)
        .map(|w| w[1].ln() - w[0].ln())
        .collect();
    Ok(ReturnSeries {
        dates: prices.dates[1..].to_vec(),
        values,
    })
}

/// Standardized return series with its stored mean and standard deviation
/// (population convention).
#[derive(Debug, Clone)]
pub struct ReducedSeries {
    pub values: Vec<f64>,
    pub mean: f64,
    pub sigma: f64,
}

pub fn reduce(returns: &ReturnSeries) -> Result<ReducedSeries> {
    reduce_values(&returns.values)
}

/// [`reduce`] on a raw value slice; shared by the absolute-value correlation
/// variant, which re-standardizes |y|.
pub fn reduce_values(values: &[f64]) -> Result<ReducedSeries> {
    let (reduced, mean, sigma) = stats::standardize(values)
        .ok_or_else(|| Error::Degenerate("zero variance: series cannot be standardized".into()))?;
    Ok(ReducedSeries {
        values: reduced,
        mean,
        sigma,
    })
}

/// Parsed panel manifest: instrument ids, file paths, and the target id.
#[derive(Debug, Clone)]
pub struct PanelManifest {
    pub entries: Vec<(String, PathBuf)>,
    pub target: String,
}

/// Parse a `key = value` manifest. Relative paths resolve against the
/// manifest's directory. `target` is required and must name an entry.
///
/// ```text
/// # lines starting with '#' are comments
/// target = index_future
/// index_future = data/index_future.csv
/// sp500 = data/sp500.csv
/// ```
pub fn load_manifest(path: &Path) -> Result<PanelManifest> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    let mut entries: Vec<(String, PathBuf)> = Vec::new();
    let mut target: Option<String> = None;
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::Integrity(format!(
                "{}: line {}: expected 'key = value'",
                path.display(),
                lineno + 1
            ))
        })?;
        let (key, value) = (key.trim(), value.trim());
        if key == "target" {
            if target.is_some() {
                return Err(Error::Integrity(format!(
                    "{}: line {}: 'target' given twice ('target' is reserved and cannot \
                     name an instrument)",
                    path.display(),
                    lineno + 1
                )));
            }
            target = Some(value.to_string());
        } else {
            entries.push((key.to_string(), base.join(value)));
        }
    }
    let target = target.ok_or_else(|| {
        Error::Integrity(format!("{}: manifest must name a target", path.display()))
    })?;
    if entries.is_empty() {
        return Err(Error::Integrity(format!(
            "{}: manifest lists no instruments",
            path.display()
        )));
    }
    if !entries.iter().any(|(id, _)| *id == target) {
        return Err(Error::Integrity(format!(
            "{}: target '{target}' is not among the listed instruments",
            path.display()
        )));
    }
    Ok(PanelManifest { entries, target })
}

/// Load every series in a manifest and align them.
pub fn load_panel(
    manifest: &PanelManifest,
    schema: &CsvSchema,
    policy: FillPolicy,
    from: Option<NaiveDate>,
    to: Option<NaiveDate>,
) -> Result<AlignedPanel> {
    let mut series = Vec::with_capacity(manifest.entries.len());
    for (id, path) in &manifest.entries {
        let s = load_csv(path, schema)?.with_id(id.clone());
        series.push(s.restrict(from, to)?);
    }
    align(&series, policy)
}
