use std::collections::BTreeSet;
use std::fmt::{self, Write as _};

use crate::transforms::ReprKind;

use super::metrics::{mean_std, relative_advantage};

pub const RUNS_HEADER: &str = "representation,horizon_hours,seed,test_mae_gw";
pub const AGGREGATE_HEADER: &str = "representation,horizon_hours,mean_mae_gw,std_mae_gw,rel_advantage";
pub const BASELINES_HEADER: &str = "horizon_hours,naive_linear_mae_gw,naive_differences_linear_mae_gw";

/// Test MAE of one trained network.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunResult {
    pub repr: ReprKind,
    pub horizon: usize,
    pub seed: u64,
    pub test_mae: f64,
    pub best_val_mae: f64,
    pub epochs: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AggregateRow {
    pub repr: ReprKind,
    pub horizon: usize,
    pub mean_mae: f64,
    /// Population standard deviation over seeds.
    pub std_mae: f64,
    /// Against the Naive mean at the same horizon, if Naive was run.
    pub rel_advantage: Option<f64>,
}

/// Test MAE of the two linear baselines at one horizon.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BaselineRow {
    pub horizon: usize,
    pub naive_mae: f64,
    pub differences_mae: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ExperimentReport {
    pub runs: Vec<RunResult>,
    pub aggregates: Vec<AggregateRow>,
    pub baselines: Vec<BaselineRow>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Markdown,
}

#[derive(Debug)]
pub enum ReportParseError {
    Csv(csv::Error),
    Header { expected: &'static str, found: String },
    Field { line: u64, message: String },
}

impl fmt::Display for ReportParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ReportParseError::Csv(e) => write!(f, "{e}"),
            ReportParseError::Header { expected, found } => write!(f, "expected header `{expected}`, found `{found}`"),
            ReportParseError::Field { line, message } => write!(f, "line {line}: {message}"),
        }
    }
}

impl std::error::Error for ReportParseError {}

impl From<csv::Error> for ReportParseError {
    fn from(e: csv::Error) -> Self {
        ReportParseError::Csv(e)
    }
}

impl ExperimentReport {
    /// Aggregates `runs` per (representation, horizon) in order of first
    /// appearance.
    pub fn from_runs(runs: Vec<RunResult>, baselines: Vec<BaselineRow>) -> Self {
        let mut keys: Vec<(ReprKind, usize)> = Vec::new();
        for r in &runs {
            if !keys.contains(&(r.repr, r.horizon)) {
                keys.push((r.repr, r.horizon));
            }
        }
        let mut aggregates: Vec<AggregateRow> = keys
            .iter()
            .map(|&(repr, horizon)| {
                let maes: Vec<f64> =
                    runs.iter().filter(|r| r.repr == repr && r.horizon == horizon).map(|r| r.test_mae).collect();
                let (mean_mae, std_mae) = mean_std(&maes).expect("key taken from runs");
                AggregateRow { repr, horizon, mean_mae, std_mae, rel_advantage: None }
            })
            .collect();
        let naive: Vec<(usize, f64)> =
            aggregates.iter().filter(|a| a.repr == ReprKind::Naive).map(|a| (a.horizon, a.mean_mae)).collect();
        for a in &mut aggregates {
            if let Some(&(_, m)) = naive.iter().find(|(h, _)| *h == a.horizon) {
                a.rel_advantage = relative_advantage(a.mean_mae, m).ok();
            }
        }
        Self { runs, aggregates, baselines }
    }

    pub fn aggregate(&self, repr: ReprKind, horizon: usize) -> Option<&AggregateRow> {
        self.aggregates.iter().find(|a| a.repr == repr && a.horizon == horizon)
    }

    pub fn baseline(&self, horizon: usize) -> Option<&BaselineRow> {
        self.baselines.iter().find(|b| b.horizon == horizon)
    }
}

fn opt6(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.6}")).unwrap_or_default()
}

pub fn render_runs_csv(r: &ExperimentReport) -> String {
    let mut s = format!("{RUNS_HEADER}\n");
    for x in &r.runs {
        writeln!(s, "{},{},{},{:.6}", x.repr, x.horizon, x.seed, x.test_mae).unwrap();
    }
    s
}

pub fn render_aggregate_csv(r: &ExperimentReport) -> String {
    let mut s = format!("{AGGREGATE_HEADER}\n");
    for a in &r.aggregates {
        writeln!(s, "{},{},{:.6},{:.6},{}", a.repr, a.horizon, a.mean_mae, a.std_mae, opt6(a.rel_advantage)).unwrap();
    }
    s
}

pub fn render_baselines_csv(r: &ExperimentReport) -> String {
    let mut s = format!("{BASELINES_HEADER}\n");
    for b in &r.baselines {
        writeln!(s, "{},{:.6},{:.6}", b.horizon, b.naive_mae, b.differences_mae).unwrap();
    }
    s
}

fn horizon_label(h: usize) -> String {
    match h {
        1 => "one-hour (1 h)".into(),
        24 => "one-day (24 h)".into(),
        168 => "one-week (168 h)".into(),
        h => format!("{h} h"),
    }
}

/// One row per horizon, one column per representation (cells
/// `mean (±std) [rel%]`) and, when present, the two linear baselines.
pub fn render_markdown(r: &ExperimentReport) -> String {
    let reprs: Vec<ReprKind> =
        ReprKind::ALL.into_iter().filter(|k| r.aggregates.iter().any(|a| a.repr == *k)).collect();
    let with_baselines = !r.baselines.is_empty();
    let mut header = vec!["Horizon".to_string()];
    header.extend(reprs.iter().map(|k| k.title().to_string()));
    if with_baselines {
        header.push("Linear Naive".into());
        header.push("Linear Naive Differences".into());
    }
    let mut s = String::new();
    writeln!(s, "| {} |", header.join(" | ")).unwrap();
    writeln!(s, "|{}", "---|".repeat(header.len())).unwrap();

    let horizons: BTreeSet<usize> =
        r.aggregates.iter().map(|a| a.horizon).chain(r.baselines.iter().map(|b| b.horizon)).collect();
    for h in horizons {
        let mut cells = vec![horizon_label(h)];
        for k in &reprs {
            cells.push(match r.aggregate(*k, h) {
                Some(a) => {
                    let mut c = format!("{:.3} (±{:.3})", a.mean_mae, a.std_mae);
                    if let Some(rel) = a.rel_advantage {
                        write!(c, " [{:+.1}%]", rel * 100.0).unwrap();
                    }
                    c
                }
                None => "n/a".into(),
            });
        }
        if with_baselines {
            match r.baseline(h) {
                Some(b) => {
                    cells.push(format!("{:.3}", b.naive_mae));
                    let rel = relative_advantage(b.differences_mae, b.naive_mae).ok();
                    let mut c = format!("{:.3}", b.differences_mae);
                    if let Some(rel) = rel {
                        write!(c, " [{:+.1}%]", rel * 100.0).unwrap();
                    }
                    cells.push(c);
                }
                None => cells.extend(["n/a".to_string(), "n/a".to_string()]),
            }
        }
        writeln!(s, "| {} |", cells.join(" | ")).unwrap();
    }
    s
}

pub fn render_report(r: &ExperimentReport, format: ReportFormat) -> String {
    match format {
        ReportFormat::Csv => render_aggregate_csv(r),
        ReportFormat::Markdown => render_markdown(r),
    }
}

fn records(text: &str, expected: &'static str) -> Result<Vec<csv::StringRecord>, ReportParseError> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(text.as_bytes());
    let found = rdr.headers()?.iter().collect::<Vec<_>>().join(",");
    if found != expected {
        return Err(ReportParseError::Header { expected, found });
    }
    rdr.records().map(|r| r.map_err(ReportParseError::from)).collect()
}

fn field<T: std::str::FromStr>(rec: &csv::StringRecord, i: usize) -> Result<T, ReportParseError> {
    let line = rec.position().map_or(0, |p| p.line());
    let raw = rec.get(i).ok_or_else(|| ReportParseError::Field { line, message: format!("missing column {i}") })?;
    raw.trim().parse().map_err(|_| ReportParseError::Field { line, message: format!("cannot parse `{raw}`") })
}

pub fn parse_aggregate_csv(text: &str) -> Result<Vec<AggregateRow>, ReportParseError> {
    records(text, AGGREGATE_HEADER)?
        .iter()
        .map(|rec| {
            let rel = rec.get(4).unwrap_or("");
            Ok(AggregateRow {
                repr: field(rec, 0)?,
                horizon: field(rec, 1)?,
                mean_mae: field(rec, 2)?,
                std_mae: field(rec, 3)?,
                rel_advantage: if rel.is_empty() { None } else { Some(field(rec, 4)?) },
            })
        })
        .collect()
}

/// Runs parsed back from the per-run CSV (validation MAE and epochs are
/// not stored there and come back as NaN and 0).
pub fn parse_runs_csv(text: &str) -> Result<Vec<RunResult>, ReportParseError> {
    records(text, RUNS_HEADER)?
        .iter()
        .map(|rec| {
            Ok(RunResult {
                repr: field(rec, 0)?,
                horizon: field(rec, 1)?,
                seed: field(rec, 2)?,
                test_mae: field(rec, 3)?,
                best_val_mae: f64::NAN,
                epochs: 0,
            })
        })
        .collect()
}

pub fn parse_baselines_csv(text: &str) -> Result<Vec<BaselineRow>, ReportParseError> {
    records(text, BASELINES_HEADER)?
        .iter()
        .map(|rec| Ok(BaselineRow { horizon: field(rec, 0)?, naive_mae: field(rec, 1)?, differences_mae: field(rec, 2)? }))
        .collect()
}
