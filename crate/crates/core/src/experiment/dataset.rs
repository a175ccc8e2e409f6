use chrono::{DateTime, Datelike, Duration, TimeZone, Utc};

use crate::calendar::{CalendarEncoder, CalendarVector};
use crate::ingest::TimeSeries;
use crate::transforms::{build_representation_with, ReprInput, ReprKind, ReprLayout, TransformError};

/// One supervised example: history at origin `k`, calendar of the target
/// time `k + h` and the demand observed there.
///
/// The target is stored as the difference `x_{k+h} - x_k`; the absolute
/// target is `x_k + target_delta` in floating point, so the two always
/// reconstruct each other exactly. It equals the observed value except
/// within one ulp when the two loads differ by more than a factor of two.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub repr: ReprInput,
    /// Encoded at the target time, not the origin.
    pub calendar: CalendarVector,
    /// `x_k` in GW, needed to reconstruct difference forecasts.
    pub x_k: f64,
    target_delta: f64,
    target_absolute: f64,
    pub horizon: usize,
    pub origin_timestamp: DateTime<Utc>,
}

impl Sample {
    /// `target` is the observed `x_{k+h}` in GW.
    pub fn new(
        repr: ReprInput,
        calendar: CalendarVector,
        x_k: f64,
        target: f64,
        horizon: usize,
        origin_timestamp: DateTime<Utc>,
    ) -> Self {
        let mut s = Self { repr, calendar, x_k, target_delta: 0.0, target_absolute: 0.0, horizon, origin_timestamp };
        s.set_target(target);
        s
    }

    /// Replaces the observed `x_{k+h}`.
    pub fn set_target(&mut self, target: f64) {
        self.target_delta = target - self.x_k;
        self.target_absolute = self.x_k + self.target_delta;
    }

    /// `x_{k+h}` in GW.
    pub fn target_absolute(&self) -> f64 {
        self.target_absolute
    }

    pub fn target_timestamp(&self) -> DateTime<Utc> {
        self.origin_timestamp + Duration::hours(self.horizon as i64)
    }

    /// `x_{k+h} - x_k`.
    pub fn target_delta(&self) -> f64 {
        self.target_delta
    }

    /// What a model for this representation regresses on.
    pub fn training_target(&self) -> f64 {
        if self.repr.kind.is_differenced() {
            self.target_delta()
        } else {
            self.target_absolute()
        }
    }
}

/// Builds the sample whose origin is position `k` of `ts`.
pub fn build_sample(
    ts: &TimeSeries,
    k: usize,
    kind: ReprKind,
    h: usize,
    layout: ReprLayout,
    encoder: &CalendarEncoder,
) -> Result<Sample, TransformError> {
    let target = k + h;
    if target >= ts.len() {
        return Err(TransformError::IndexOutOfBounds { index: target, len: ts.len() });
    }
    let values = ts.values();
    let repr = build_representation_with(values, k, kind, h, layout)?;
    Ok(Sample::new(repr, encoder.encode(ts.timestamps()[target]), values[k], values[target], h, ts.timestamps()[k]))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Split {
    Train,
    Val,
    Test,
}

impl Split {
    pub fn as_str(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Val => "val",
            Split::Test => "test",
        }
    }
}

/// Inclusive calendar-year ranges of each split.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SplitYears {
    pub train: (i32, i32),
    pub val: (i32, i32),
    pub test: (i32, i32),
}

impl Default for SplitYears {
    fn default() -> Self {
        Self { train: (2015, 2017), val: (2018, 2018), test: (2019, 2019) }
    }
}

impl SplitYears {
    pub fn range(&self, split: Split) -> (i32, i32) {
        match split {
            Split::Train => self.train,
            Split::Val => self.val,
            Split::Test => self.test,
        }
    }

    /// Split of a target timestamp, by its UTC calendar year.
    pub fn classify(&self, t: DateTime<Utc>) -> Option<Split> {
        let y = t.year();
        [Split::Train, Split::Val, Split::Test].into_iter().find(|&s| {
            let (a, b) = self.range(s);
            (a..=b).contains(&y)
        })
    }

    pub fn validate(&self) -> Result<(), String> {
        let rs = [self.train, self.val, self.test];
        for (a, b) in rs {
            if a > b {
                return Err(format!("empty year range {a}-{b}"));
            }
        }
        for i in 0..3 {
            for j in i + 1..3 {
                let (a, b) = (rs[i], rs[j]);
                if a.0 <= b.1 && b.0 <= a.1 {
                    return Err(format!("split years overlap: {}-{} and {}-{}", a.0, a.1, b.0, b.1));
                }
            }
        }
        Ok(())
    }

    /// `[Jan 1 of first year, Jan 1 after last year)` in UTC.
    pub fn bounds(&self, split: Split) -> (DateTime<Utc>, DateTime<Utc>) {
        let (a, b) = self.range(split);
        let start = Utc.with_ymd_and_hms(a, 1, 1, 0, 0, 0).unwrap();
        let end = Utc.with_ymd_and_hms(b + 1, 1, 1, 0, 0, 0).unwrap();
        (start, end)
    }
}

/// Split of `t` under the default 2015-2017 / 2018 / 2019 years.
pub fn split_by_year(t: DateTime<Utc>) -> Option<Split> {
    SplitYears::default().classify(t)
}

/// What to do with targets inside a split whose history is not available.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum HistoryPolicy {
    /// Fail with `InsufficientHistory`.
    #[default]
    Strict,
    /// Skip them. The cut-off is the differenced requirement
    /// (`window - 1 + 2h` hours before the target) for every kind, so
    /// raw and difference datasets keep identical target sets.
    DropUncovered,
}

/// All samples whose target time falls in `split`. History windows may
/// reach back across the split boundary.
pub fn make_dataset(
    ts: &TimeSeries,
    kind: ReprKind,
    h: usize,
    split: Split,
    years: &SplitYears,
    layout: ReprLayout,
    policy: HistoryPolicy,
    encoder: &CalendarEncoder,
) -> Result<Vec<Sample>, TransformError> {
    let (start, end) = years.bounds(split);
    let min_target = layout.window - 1 + 2 * h;
    let mut out = Vec::new();
    for (j, t) in ts.timestamps().iter().enumerate() {
        if *t < start || *t >= end {
            continue;
        }
        if j < h {
            if policy == HistoryPolicy::DropUncovered {
                continue;
            }
            return Err(TransformError::InsufficientHistory { k: 0, needed: layout.window - 1 + h });
        }
        if policy == HistoryPolicy::DropUncovered && j < min_target {
            continue;
        }
        out.push(build_sample(ts, j - h, kind, h, layout, encoder)?);
    }
    Ok(out)
}
