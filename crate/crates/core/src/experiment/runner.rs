use std::fmt;

use rayon::prelude::*;

use crate::calendar::{CalendarEncoder, HolidayCalendar, DEFAULT_TZ_OFFSET_HOURS};
use crate::ingest::TimeSeries;
use crate::models::{
    build_model, fit_linear, predict_batch, predict_linear, train_model, Architecture, Family, ModelSpec,
    TrainingConfig,
};
use crate::numerics::seeded_rng;
use crate::transforms::{ReprKind, ReprLayout};

use super::dataset::{make_dataset, HistoryPolicy, Sample, Split, SplitYears};
use super::metrics::mae;
use super::report::{BaselineRow, ExperimentReport, RunResult};

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub representations: Vec<ReprKind>,
    pub horizons: Vec<usize>,
    pub seeds: Vec<u64>,
    pub splits: SplitYears,
    /// Network used for the two vector representations; matrix
    /// representations always use the CNN.
    pub vector_family: Family,
    pub arch: Architecture,
    pub training: TrainingConfig,
    pub layout: ReprLayout,
    pub tz_offset_hours: i32,
    pub history_policy: HistoryPolicy,
    /// Also fit the two linear baselines once per horizon.
    pub baselines: bool,
    /// Worker threads for the seed runs of one grid cell.
    pub jobs: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            representations: ReprKind::ALL.to_vec(),
            horizons: vec![1, 24, 168],
            seeds: (1..=10).collect(),
            splits: SplitYears::default(),
            vector_family: Family::Fcn,
            arch: Architecture::default(),
            training: TrainingConfig::default(),
            layout: ReprLayout::default(),
            tz_offset_hours: DEFAULT_TZ_OFFSET_HOURS,
            history_policy: HistoryPolicy::DropUncovered,
            baselines: true,
            jobs: 1,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), String> {
        if self.representations.is_empty() {
            return Err("no representations selected".into());
        }
        if self.horizons.is_empty() || self.horizons.contains(&0) {
            return Err("horizons must be a non-empty list of positive hours".into());
        }
        if self.seeds.is_empty() {
            return Err("seed list is empty".into());
        }
        if !matches!(self.vector_family, Family::Fcn | Family::Mlp10) {
            return Err(format!("{} cannot serve as the vector-representation network", self.vector_family));
        }
        self.training.validate().map_err(|e| e.to_string())?;
        self.splits.validate()
    }

    pub fn family_for(&self, repr: ReprKind) -> Family {
        if repr.is_matrix() {
            Family::Cnn
        } else {
            self.vector_family
        }
    }

    pub fn spec_for(&self, repr: ReprKind, horizon: usize) -> ModelSpec {
        ModelSpec {
            family: self.family_for(repr),
            repr,
            horizon,
            layout: self.layout,
            arch: self.arch.clone(),
            training: self.training,
        }
    }
}

/// A failure somewhere in the grid, with the cell it happened in.
#[derive(Debug)]
pub struct ExperimentError {
    pub stage: &'static str,
    pub repr: Option<ReprKind>,
    pub horizon: Option<usize>,
    pub seed: Option<u64>,
    pub source: Box<dyn std::error::Error + Send + Sync>,
}

impl ExperimentError {
    fn new(stage: &'static str, source: impl Into<Box<dyn std::error::Error + Send + Sync>>) -> Self {
        Self { stage, repr: None, horizon: None, seed: None, source: source.into() }
    }

    fn at(mut self, repr: Option<ReprKind>, horizon: Option<usize>, seed: Option<u64>) -> Self {
        self.repr = repr;
        self.horizon = horizon;
        self.seed = seed;
        self
    }
}

impl fmt::Display for ExperimentError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.stage)?;
        let mut ctx = Vec::new();
        if let Some(r) = self.repr {
            ctx.push(format!("repr={r}"));
        }
        if let Some(h) = self.horizon {
            ctx.push(format!("horizon={h}"));
        }
        if let Some(s) = self.seed {
            ctx.push(format!("seed={s}"));
        }
        if !ctx.is_empty() {
            write!(f, " [{}]", ctx.join(", "))?;
        }
        write!(f, ": {}", self.source)
    }
}

impl std::error::Error for ExperimentError {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        Some(self.source.as_ref())
    }
}

/// Emitted as soon as a result is available.
#[derive(Debug, Clone, Copy)]
pub enum Progress {
    Baseline(BaselineRow),
    Run(RunResult),
}

pub fn run_experiment(
    cfg: &ExperimentConfig,
    ts: &TimeSeries,
    hol: &HolidayCalendar,
) -> Result<ExperimentReport, ExperimentError> {
    run_experiment_with_progress(cfg, ts, hol, &|_| {})
}

struct Datasets {
    train: Vec<Sample>,
    val: Vec<Sample>,
    test: Vec<Sample>,
}

fn datasets(
    cfg: &ExperimentConfig,
    ts: &TimeSeries,
    enc: &CalendarEncoder,
    repr: ReprKind,
    h: usize,
) -> Result<Datasets, ExperimentError> {
    let build = |split: Split| {
        make_dataset(ts, repr, h, split, &cfg.splits, cfg.layout, cfg.history_policy, enc)
            .map_err(|e| ExperimentError::new("dataset", format!("{} split: {e}", split.as_str())))
            .and_then(|s| {
                if s.is_empty() {
                    Err(ExperimentError::new("dataset", format!("{} split has no samples", split.as_str())))
                } else {
                    Ok(s)
                }
            })
    };
    let at = |e: ExperimentError| e.at(Some(repr), Some(h), None);
    Ok(Datasets {
        train: build(Split::Train).map_err(at)?,
        val: build(Split::Val).map_err(at)?,
        test: build(Split::Test).map_err(at)?,
    })
}

fn baseline_mae(
    cfg: &ExperimentConfig,
    ts: &TimeSeries,
    enc: &CalendarEncoder,
    repr: ReprKind,
    h: usize,
) -> Result<f64, ExperimentError> {
    let Datasets { mut train, val, test } = datasets(cfg, ts, enc, repr, h)?;
    train.extend(val);
    let at = |e: ExperimentError| e.at(Some(repr), Some(h), None);
    let m = fit_linear(&train, repr.is_differenced()).map_err(|e| at(ExperimentError::new("baseline", e)))?;
    let pred = test.iter().map(|s| predict_linear(&m, s)).collect::<Result<Vec<_>, _>>();
    let pred = pred.map_err(|e| at(ExperimentError::new("baseline", e)))?;
    let y: Vec<f64> = test.iter().map(|s| s.target_absolute()).collect();
    mae(&y, &pred).map_err(|e| at(ExperimentError::new("baseline", e)))
}

fn run_seed(cfg: &ExperimentConfig, d: &Datasets, repr: ReprKind, h: usize, seed: u64) -> Result<RunResult, ExperimentError> {
    let ctx = |e: ExperimentError| e.at(Some(repr), Some(h), Some(seed));
    let spec = cfg.spec_for(repr, h);
    let model = build_model(spec, &mut seeded_rng(seed)).map_err(|e| ctx(ExperimentError::new("models", e)))?;
    let model = train_model(model, &d.train, &d.val, seed).map_err(|e| ctx(ExperimentError::new("training", e)))?;
    let pred = predict_batch(&model, &d.test).map_err(|e| ctx(ExperimentError::new("evaluation", e)))?;
    let y: Vec<f64> = d.test.iter().map(|s| s.target_absolute()).collect();
    let test_mae = mae(&y, &pred).map_err(|e| ctx(ExperimentError::new("evaluation", e)))?;
    Ok(RunResult {
        repr,
        horizon: h,
        seed,
        test_mae,
        best_val_mae: model.best_val_mae.unwrap_or(f64::NAN),
        epochs: model.history.len(),
    })
}

/// Trains one network per (representation, horizon, seed), fits the
/// linear baselines per horizon and aggregates the test MAEs.
///
/// Results do not depend on `cfg.jobs`.
pub fn run_experiment_with_progress(
    cfg: &ExperimentConfig,
    ts: &TimeSeries,
    hol: &HolidayCalendar,
    progress: &(dyn Fn(&Progress) + Sync),
) -> Result<ExperimentReport, ExperimentError> {
    cfg.validate().map_err(|e| ExperimentError::new("config", e))?;
    let enc = CalendarEncoder::new(hol.clone(), cfg.tz_offset_hours);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs.max(1))
        .build()
        .map_err(|e| ExperimentError::new("config", e))?;

    let mut runs = Vec::new();
    let mut baselines = Vec::new();
    for &h in &cfg.horizons {
        if cfg.baselines {
            let row = BaselineRow {
                horizon: h,
                naive_mae: baseline_mae(cfg, ts, &enc, ReprKind::Naive, h)?,
                differences_mae: baseline_mae(cfg, ts, &enc, ReprKind::NaiveDifferences, h)?,
            };
            progress(&Progress::Baseline(row));
            baselines.push(row);
        }
        for &repr in &cfg.representations {
            let d = datasets(cfg, ts, &enc, repr, h)?;
            let cell: Vec<Result<RunResult, ExperimentError>> = pool.install(|| {
                cfg.seeds
                    .par_iter()
                    .map(|&seed| {
                        let r = run_seed(cfg, &d, repr, h, seed);
                        if let Ok(r) = &r {
                            progress(&Progress::Run(*r));
                        }
                        r
                    })
                    .collect()
            });
            for r in cell {
                runs.push(r?);
            }
        }
    }
    Ok(ExperimentReport::from_runs(runs, baselines))
}
