//! Calendar features of a target timestamp.
//!
//! Hour of day, day of week and day of year are encoded as sine/cosine
//! pairs; weekend and public holiday are 0/1 flags. The local clock is a
//! fixed offset from UTC (no DST), +1 h by default.

use std::collections::BTreeSet;
use std::f64::consts::PI;
use std::fmt;
use std::path::{Path, PathBuf};

use chrono::{DateTime, Datelike, Duration, NaiveDate, Timelike, Utc};

pub const CALENDAR_DIM: usize = 8;
pub const DEFAULT_TZ_OFFSET_HOURS: i32 = 1;

/// German nationwide public holidays 2014-2019, one `YYYY-MM-DD` per line.
pub const BUNDLED_GERMAN_HOLIDAYS: &str = include_str!("../data/de_holidays.txt");

#[derive(Debug)]
pub enum CalendarError {
    Io { path: PathBuf, source: std::io::Error },
    UnparsableDate { line: usize, value: String },
}

impl fmt::Display for CalendarError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CalendarError::Io { path, source } => write!(f, "cannot read {}: {source}", path.display()),
            CalendarError::UnparsableDate { line, value } => {
                write!(f, "unparsable date `{value}` on line {line}")
            }
        }
    }
}

impl std::error::Error for CalendarError {}

/// The 8-component calendar vector, in the fixed order
/// `[hour_sin, hour_cos, dow_sin, dow_cos, doy_sin, doy_cos, weekend, holiday]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CalendarVector {
    pub hour_sin: f64,
    pub hour_cos: f64,
    pub dow_sin: f64,
    pub dow_cos: f64,
    pub doy_sin: f64,
    pub doy_cos: f64,
    pub weekend: f64,
    pub holiday: f64,
}

impl CalendarVector {
    pub fn to_array(&self) -> [f64; CALENDAR_DIM] {
        [
            self.hour_sin,
            self.hour_cos,
            self.dow_sin,
            self.dow_cos,
            self.doy_sin,
            self.doy_cos,
            self.weekend,
            self.holiday,
        ]
    }

    pub fn from_array(a: [f64; CALENDAR_DIM]) -> Self {
        Self {
            hour_sin: a[0],
            hour_cos: a[1],
            dow_sin: a[2],
            dow_cos: a[3],
            doy_sin: a[4],
            doy_cos: a[5],
            weekend: a[6],
            holiday: a[7],
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct HolidayCalendar {
    dates: BTreeSet<NaiveDate>,
}

impl HolidayCalendar {
    pub fn new(dates: impl IntoIterator<Item = NaiveDate>) -> Self {
        Self { dates: dates.into_iter().collect() }
    }

    pub fn bundled_german() -> Self {
        Self::parse(BUNDLED_GERMAN_HOLIDAYS).expect("bundled holiday list is well formed")
    }

    /// One date per non-empty line; duplicates collapse.
    pub fn parse(text: &str) -> Result<Self, CalendarError> {
        let mut dates = BTreeSet::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let d = NaiveDate::parse_from_str(line, "%Y-%m-%d")
                .map_err(|_| CalendarError::UnparsableDate { line: i + 1, value: line.to_string() })?;
            dates.insert(d);
        }
        Ok(Self { dates })
    }

    pub fn contains(&self, d: NaiveDate) -> bool {
        self.dates.contains(&d)
    }

    pub fn len(&self) -> usize {
        self.dates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dates.is_empty()
    }

    pub fn dates(&self) -> impl Iterator<Item = &NaiveDate> {
        self.dates.iter()
    }
}

pub fn load_holidays(path: impl AsRef<Path>) -> Result<HolidayCalendar, CalendarError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|source| CalendarError::Io { path: path.to_path_buf(), source })?;
    HolidayCalendar::parse(&text)
}

fn angle_pair(pos: f64, period: f64) -> (f64, f64) {
    let a = 2.0 * PI * pos / period;
    (a.sin(), a.cos())
}

/// Encodes `t` on a local clock `tz_offset_hours` ahead of UTC.
///
/// Periods: 24 for the hour (0..23), 7 for the weekday (Monday = 0) and 366
/// for the day of year (1..366). Weekend means Saturday or Sunday.
pub fn encode_calendar(t: DateTime<Utc>, hol: &HolidayCalendar, tz_offset_hours: i32) -> CalendarVector {
    let local = t.naive_utc() + Duration::hours(tz_offset_hours as i64);
    let dow = local.weekday().num_days_from_monday();
    let (hour_sin, hour_cos) = angle_pair(local.hour() as f64, 24.0);
    let (dow_sin, dow_cos) = angle_pair(dow as f64, 7.0);
    let (doy_sin, doy_cos) = angle_pair(local.ordinal() as f64, 366.0);
    CalendarVector {
        hour_sin,
        hour_cos,
        dow_sin,
        dow_cos,
        doy_sin,
        doy_cos,
        weekend: if dow >= 5 { 1.0 } else { 0.0 },
        holiday: if hol.contains(local.date()) { 1.0 } else { 0.0 },
    }
}

/// Holiday set plus clock offset, bundled for repeated encoding.
#[derive(Debug, Clone)]
pub struct CalendarEncoder {
    pub holidays: HolidayCalendar,
    pub tz_offset_hours: i32,
}

impl CalendarEncoder {
    pub fn new(holidays: HolidayCalendar, tz_offset_hours: i32) -> Self {
        Self { holidays, tz_offset_hours }
    }

    pub fn encode(&self, t: DateTime<Utc>) -> CalendarVector {
        encode_calendar(t, &self.holidays, self.tz_offset_hours)
    }
}

impl Default for CalendarEncoder {
    fn default() -> Self {
        Self::new(HolidayCalendar::bundled_german(), DEFAULT_TZ_OFFSET_HOURS)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::TimeZone;

    fn utc(y: i32, m: u32, d: u32, h: u32) -> DateTime<Utc> {
        Utc.with_ymd_and_hms(y, m, d, h, 0, 0).unwrap()
    }

    #[test]
    fn hour_zero_and_six() {
        let hol = HolidayCalendar::default();
        let c = encode_calendar(utc(2019, 3, 18, 0), &hol, 0);
        assert_eq!(c.hour_sin, 0.0);
        assert_eq!(c.hour_cos, 1.0);
        let c = encode_calendar(utc(2019, 3, 18, 6), &hol, 0);
        assert!((c.hour_sin - 1.0).abs() < 1e-15);
        assert!(c.hour_cos.abs() < 1e-15);
    }

    #[test]
    fn offset_shifts_local_hour() {
        let hol = HolidayCalendar::default();
        let a = encode_calendar(utc(2019, 3, 18, 5), &hol, 1);
        let b = encode_calendar(utc(2019, 3, 18, 6), &hol, 0);
        assert_eq!(a, b);
    }

    #[test]
    fn saturday_is_weekend() {
        // 2019-03-16 is a Saturday
        let c = encode_calendar(utc(2019, 3, 16, 12), &HolidayCalendar::default(), 1);
        assert_eq!(c.weekend, 1.0);
        assert_eq!(c.holiday, 0.0);
        let monday = encode_calendar(utc(2019, 3, 18, 12), &HolidayCalendar::default(), 1);
        assert_eq!(monday.weekend, 0.0);
        assert_eq!(monday.dow_sin, 0.0);
        assert_eq!(monday.dow_cos, 1.0);
    }

    #[test]
    fn new_year_2019_is_bundled_holiday() {
        let hol = HolidayCalendar::bundled_german();
        let c = encode_calendar(utc(2019, 1, 1, 10), &hol, 1);
        assert_eq!(c.holiday, 1.0);
        // 23:00 UTC on New Year's Eve is already Jan 1 on the +1 clock.
        let c = encode_calendar(utc(2018, 12, 31, 23), &hol, 1);
        assert_eq!(c.holiday, 1.0);
        let c = encode_calendar(utc(2018, 12, 31, 22), &hol, 1);
        assert_eq!(c.holiday, 0.0);
    }

    #[test]
    fn bundled_list_contents() {
        let hol = HolidayCalendar::bundled_german();
        let d = |y, m, dd| NaiveDate::from_ymd_opt(y, m, dd).unwrap();
        assert!(hol.contains(d(2019, 10, 3)));
        assert!(hol.contains(d(2019, 4, 19))); // Good Friday
        assert!(hol.contains(d(2017, 10, 31))); // one-off Reformation Day
        assert!(hol.contains(d(2014, 12, 25)));
        assert!(!hol.contains(d(2018, 10, 31)));
        assert_eq!(hol.len(), 55);
    }

    #[test]
    fn parse_rules() {
        let hol = HolidayCalendar::parse("2019-01-01\n\n2019-10-03\n").unwrap();
        assert_eq!(hol.len(), 2);
        let hol = HolidayCalendar::parse("2019-01-01\n2019-01-01\n").unwrap();
        assert_eq!(hol.len(), 1);
        match HolidayCalendar::parse("2019-01-01\n2019-13-01\n") {
            Err(CalendarError::UnparsableDate { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn array_order_roundtrip() {
        let c = encode_calendar(utc(2016, 2, 29, 13), &HolidayCalendar::bundled_german(), 1);
        assert_eq!(CalendarVector::from_array(c.to_array()), c);
        assert_eq!(c.to_array()[6], c.weekend);
    }
}
