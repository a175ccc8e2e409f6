//! Loading and validating hourly demand series.
//!
//! Input files follow the Open Power System Data "singleindex" layout: a
//! header row, a `utc_timestamp` column in ISO 8601 with a `Z` suffix and
//! one column per country/source. Empty cells are treated as missing hours.

use std::fmt;
use std::path::{Path, PathBuf};

use chrono::{DateTime, Duration, NaiveDateTime, TimeZone, Utc};

/// Name of the timestamp column in OPSD exports.
pub const TIMESTAMP_COLUMN: &str = "utc_timestamp";
/// German load column used by default.
pub const DEFAULT_DEMAND_COLUMN: &str = "DE_load_actual_entsoe_transparency";

const HOUR_SECS: i64 = 3600;

#[derive(Debug)]
pub enum IngestError {
    Io { path: PathBuf, source: std::io::Error },
    Csv(csv::Error),
    MissingColumn(String),
    /// `row` is the 1-based line number in the file (the header is line 1).
    UnparsableTimestamp { row: u64, value: String },
    UnparsableValue { row: u64, value: String },
    EmptyRange,
    NotIncreasing { index: usize },
    Misaligned { index: usize },
    GapTooLarge { start: DateTime<Utc>, hours: usize },
    InvalidConfig(String),
}

impl fmt::Display for IngestError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IngestError::Io { path, source } => write!(f, "cannot read {}: {source}", path.display()),
            IngestError::Csv(e) => write!(f, "csv error: {e}"),
            IngestError::MissingColumn(c) => write!(f, "column `{c}` not found in header"),
            IngestError::UnparsableTimestamp { row, value } => {
                write!(f, "unparsable timestamp `{value}` on line {row}")
            }
            IngestError::UnparsableValue { row, value } => {
                write!(f, "unparsable demand value `{value}` on line {row}")
            }
            IngestError::EmptyRange => write!(f, "no observations inside the requested time window"),
            IngestError::NotIncreasing { index } => {
                write!(f, "timestamps not strictly increasing at position {index}")
            }
            IngestError::Misaligned { index } => {
                write!(f, "timestamp at position {index} is not on the hourly grid")
            }
            IngestError::GapTooLarge { start, hours } => {
                write!(f, "gap of {hours} missing hours starting at {}", start.format("%Y-%m-%dT%H:%MZ"))
            }
            IngestError::InvalidConfig(msg) => write!(f, "invalid ingest configuration: {msg}"),
        }
    }
}

impl std::error::Error for IngestError {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            IngestError::Io { source, .. } => Some(source),
            IngestError::Csv(e) => Some(e),
            _ => None,
        }
    }
}

impl From<csv::Error> for IngestError {
    fn from(e: csv::Error) -> Self {
        IngestError::Csv(e)
    }
}

/// Hourly demand values in GW.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    pub name: String,
    timestamps: Vec<DateTime<Utc>>,
    values: Vec<f64>,
}

impl TimeSeries {
    /// Builds a series from parallel vectors. Ordering is not checked here;
    /// run [`validate_hourly`] to enforce the hourly contract.
    pub fn new(name: impl Into<String>, timestamps: Vec<DateTime<Utc>>, values: Vec<f64>) -> Self {
        assert_eq!(timestamps.len(), values.len(), "timestamps and values differ in length");
        Self { name: name.into(), timestamps, values }
    }

    /// Contiguous hourly series starting at `start`.
    pub fn hourly(name: impl Into<String>, start: DateTime<Utc>, values: Vec<f64>) -> Self {
        let timestamps = (0..values.len()).map(|i| start + Duration::hours(i as i64)).collect();
        Self { name: name.into(), timestamps, values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn timestamps(&self) -> &[DateTime<Utc>] {
        &self.timestamps
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn start(&self) -> Option<DateTime<Utc>> {
        self.timestamps.first().copied()
    }

    pub fn end(&self) -> Option<DateTime<Utc>> {
        self.timestamps.last().copied()
    }

    /// Position of `t` in a validated (contiguous hourly) series.
    pub fn index_of(&self, t: DateTime<Utc>) -> Option<usize> {
        let start = self.start()?;
        let secs = (t - start).num_seconds();
        if secs < 0 || secs % HOUR_SECS != 0 {
            return None;
        }
        let idx = (secs / HOUR_SECS) as usize;
        (idx < self.len() && self.timestamps[idx] == t).then_some(idx)
    }

    /// Same series with every value multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            name: self.name.clone(),
            timestamps: self.timestamps.clone(),
            values: self.values.iter().map(|v| v * factor).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IngestConfig {
    pub column_name: String,
    pub start: DateTime<Utc>,
    pub end: DateTime<Utc>,
    pub max_gap_fill_hours: usize,
    /// Multiplier applied to raw values; OPSD load is in MW, so 0.001 yields GW.
    pub unit_scale: f64,
}

impl Default for IngestConfig {
    fn default() -> Self {
        Self {
            column_name: DEFAULT_DEMAND_COLUMN.to_string(),
            start: Utc.with_ymd_and_hms(2014, 1, 1, 0, 0, 0).unwrap(),
            end: Utc.with_ymd_and_hms(2019, 12, 31, 23, 0, 0).unwrap(),
            max_gap_fill_hours: 3,
            unit_scale: 0.001,
        }
    }
}

impl IngestConfig {
    pub fn validate(&self) -> Result<(), IngestError> {
        if self.start >= self.end {
            return Err(IngestError::InvalidConfig("start must precede end".into()));
        }
        if !self.unit_scale.is_finite() {
            return Err(IngestError::InvalidConfig("unit_scale must be finite".into()));
        }
        Ok(())
    }
}

/// Parses `2015-01-01T00:00:00Z`, `2015-01-01T00:00Z` and offset-carrying
/// RFC 3339 strings. Strings without a zone are taken as UTC.
pub fn parse_utc_timestamp(s: &str) -> Option<DateTime<Utc>> {
    let s = s.trim();
    if let Ok(dt) = DateTime::parse_from_rfc3339(s) {
        return Some(dt.with_timezone(&Utc));
    }
    let naive = s.strip_suffix('Z').unwrap_or(s);
    for fmt in ["%Y-%m-%dT%H:%M:%S", "%Y-%m-%dT%H:%M", "%Y-%m-%d %H:%M:%S", "%Y-%m-%d %H:%M"] {
        if let Ok(n) = NaiveDateTime::parse_from_str(naive, fmt) {
            return Some(Utc.from_utc_datetime(&n));
        }
    }
    None
}

/// Reads the demand column from an OPSD-style CSV and restricts it to
/// `[cfg.start, cfg.end]`. Rows whose demand cell is empty are dropped; the
/// resulting holes are handled by [`validate_hourly`].
pub fn load_demand_csv(path: impl AsRef<Path>, cfg: &IngestConfig) -> Result<TimeSeries, IngestError> {
    let path = path.as_ref();
    cfg.validate()?;
    let file = std::fs::File::open(path).map_err(|source| IngestError::Io { path: path.to_path_buf(), source })?;
    let mut ts = read_demand_csv(file, cfg)?;
    if ts.name.is_empty() {
        ts.name = cfg.column_name.clone();
    }
    Ok(ts)
}

/// Reader-based variant of [`load_demand_csv`].
pub fn read_demand_csv<R: std::io::Read>(reader: R, cfg: &IngestConfig) -> Result<TimeSeries, IngestError> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).flexible(true).from_reader(reader);
    let headers = rdr.headers()?.clone();
    let find = |name: &str| headers.iter().position(|h| h.trim() == name);
    let ts_col = find(TIMESTAMP_COLUMN).ok_or_else(|| IngestError::MissingColumn(TIMESTAMP_COLUMN.into()))?;
    let val_col = find(&cfg.column_name).ok_or_else(|| IngestError::MissingColumn(cfg.column_name.clone()))?;

    let mut timestamps = Vec::new();
    let mut values = Vec::new();
    for record in rdr.records() {
        let record = record?;
        let row = record.position().map(|p| p.line()).unwrap_or(0);
        let raw_ts = record.get(ts_col).unwrap_or("");
        let t = parse_utc_timestamp(raw_ts)
            .ok_or_else(|| IngestError::UnparsableTimestamp { row, value: raw_ts.to_string() })?;
        if t < cfg.start || t > cfg.end {
            continue;
        }
        let raw_v = record.get(val_col).unwrap_or("").trim();
        if raw_v.is_empty() || raw_v.eq_ignore_ascii_case("nan") {
            continue;
        }
        let v: f64 = raw_v
            .parse()
            .map_err(|_| IngestError::UnparsableValue { row, value: raw_v.to_string() })?;
        if !v.is_finite() {
            continue;
        }
        timestamps.push(t);
        values.push(v * cfg.unit_scale);
    }
    if values.is_empty() {
        return Err(IngestError::EmptyRange);
    }
    Ok(TimeSeries { name: cfg.column_name.clone(), timestamps, values })
}

/// Enforces the hourly contract: strictly increasing timestamps on an
/// exact one-hour grid. Holes of at most `max_gap_fill_hours` consecutive
/// missing hours are filled by linear interpolation between the flanking
/// observations.
pub fn validate_hourly(ts: &TimeSeries, max_gap_fill_hours: usize) -> Result<TimeSeries, IngestError> {
    if ts.is_empty() {
        return Err(IngestError::EmptyRange);
    }
    let mut timestamps = Vec::with_capacity(ts.len());
    let mut values = Vec::with_capacity(ts.len());
    timestamps.push(ts.timestamps[0]);
    values.push(ts.values[0]);
    for i in 1..ts.len() {
        let (t0, t1) = (ts.timestamps[i - 1], ts.timestamps[i]);
        let secs = (t1 - t0).num_seconds();
        if secs <= 0 {
            return Err(IngestError::NotIncreasing { index: i });
        }
        if secs % HOUR_SECS != 0 {
            return Err(IngestError::Misaligned { index: i });
        }
        let steps = (secs / HOUR_SECS) as usize;
        let missing = steps - 1;
        if missing > max_gap_fill_hours {
            return Err(IngestError::GapTooLarge { start: t0 + Duration::hours(1), hours: missing });
        }
        let (v0, v1) = (ts.values[i - 1], ts.values[i]);
        for j in 1..steps {
            let frac = j as f64 / steps as f64;
            timestamps.push(t0 + Duration::hours(j as i64));
            values.push(v0 + (v1 - v0) * frac);
        }
        timestamps.push(t1);
        values.push(v1);
    }
    Ok(TimeSeries { name: ts.name.clone(), timestamps, values })
}

/// [`load_demand_csv`] followed by [`validate_hourly`].
pub fn load_hourly_series(path: impl AsRef<Path>, cfg: &IngestConfig) -> Result<TimeSeries, IngestError> {
    let raw = load_demand_csv(path, cfg)?;
    validate_hourly(&raw, cfg.max_gap_fill_hours)
}

/// Writes a series in the same CSV layout the loader reads, converting GW
/// back to the raw unit with `1 / unit_scale`.
pub fn write_demand_csv<W: std::io::Write>(
    writer: W,
    ts: &TimeSeries,
    column_name: &str,
    unit_scale: f64,
) -> Result<(), IngestError> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record([TIMESTAMP_COLUMN, column_name])?;
    for (t, v) in ts.timestamps.iter().zip(&ts.values) {
        w.write_record([t.format("%Y-%m-%dT%H:%M:%SZ").to_string(), format!("{}", v / unit_scale)])?;
    }
    w.flush().map_err(|source| IngestError::Io { path: PathBuf::from("<writer>"), source })?;
    Ok(())
}
