mod common;

use chrono::{Duration, TimeZone, Utc};
use common::utc;
use reprbench::calendar::{CalendarEncoder, HolidayCalendar};
use reprbench::experiment::{make_dataset, mae, HistoryPolicy, Sample, Split, SplitYears};
use reprbench::ingest::TimeSeries;
use reprbench::models::{
    build_model, fit_linear, load_checkpoint, predict_batch, predict_linear, save_checkpoint, train_model, Family,
    ModelParams, ModelSpec, TrainingConfig,
};
use reprbench::numerics::seeded_rng;
use reprbench::synthetic::{synthetic_demand, SyntheticConfig};
use reprbench::transforms::{ReprKind, ReprLayout};

const YEARS: SplitYears = SplitYears { train: (2017, 2017), val: (2018, 2018), test: (2019, 2019) };

fn datasets(ts: &TimeSeries, kind: ReprKind, h: usize, stride: usize) -> (Vec<Sample>, Vec<Sample>) {
    let enc = CalendarEncoder::new(HolidayCalendar::bundled_german(), 1);
    let make = |split| {
        make_dataset(ts, kind, h, split, &YEARS, ReprLayout::default(), HistoryPolicy::DropUncovered, &enc)
            .unwrap()
            .into_iter()
            .step_by(stride)
            .collect::<Vec<_>>()
    };
    (make(Split::Train), make(Split::Val))
}

fn synthetic() -> TimeSeries {
    let start = utc(2016, 12, 1, 0);
    let cfg = SyntheticConfig { start, hours: (utc(2018, 2, 1, 0) - start).num_hours() as usize, ..Default::default() };
    synthetic_demand(&cfg, &HolidayCalendar::bundled_german())
}

fn spec(family: Family, repr: ReprKind, h: usize, epochs: usize) -> ModelSpec {
    let mut s = ModelSpec::new(family, repr, h);
    s.training = TrainingConfig { max_epochs: epochs, ..TrainingConfig::default() };
    s
}

#[test]
fn constant_series_is_learned() {
    let start = Utc.with_ymd_and_hms(2016, 12, 1, 0, 0, 0).unwrap();
    let hours = (utc(2018, 1, 15, 0) - start).num_hours() as usize;
    let ts = TimeSeries::hourly("flat", start, vec![50.0; hours]);
    let (train, val) = datasets(&ts, ReprKind::Naive, 1, 1);
    let m = build_model(ModelSpec::new(Family::Fcn, ReprKind::Naive, 1), &mut seeded_rng(1)).unwrap();
    let m = train_model(m, &train, &val, 1).unwrap();
    let best = m.best_val_mae.unwrap();
    assert!(m.history.len() <= 200);
    assert!(best < 0.01, "validation MAE {best} after {} epochs", m.history.len());
    let preds = predict_batch(&m, &val).unwrap();
    let truth: Vec<f64> = val.iter().map(|s| s.target_absolute()).collect();
    assert!((mae(&truth, &preds).unwrap() - best).abs() < 1e-12);
}

#[test]
fn same_seed_same_model_and_early_stopping_bookkeeping() {
    let ts = synthetic();
    let (train, val) = datasets(&ts, ReprKind::NaiveDifferences, 24, 5);
    let run = |seed| {
        let m = build_model(spec(Family::Fcn, ReprKind::NaiveDifferences, 24, 8), &mut seeded_rng(seed)).unwrap();
        train_model(m, &train, &val, seed).unwrap()
    };
    let a = run(3);
    let b = run(3);
    assert_eq!(a.best_val_mae, b.best_val_mae);
    assert_eq!(a.params, b.params);
    assert_eq!(a.history, b.history);
    let c = run(4);
    assert_ne!(a.best_val_mae, c.best_val_mae);

    let best = a.best_val_mae.unwrap();
    assert!(!a.history.is_empty() && a.history.len() <= 8);
    assert!(best <= a.history[0].val_mae);
    let min = a.history.iter().map(|r| r.val_mae).fold(f64::INFINITY, f64::min);
    assert_eq!(best, min);
    // The returned parameters are the best epoch's.
    let truth: Vec<f64> = val.iter().map(|s| s.target_absolute()).collect();
    assert!((mae(&truth, &predict_batch(&a, &val).unwrap()).unwrap() - best).abs() < 1e-12);
}

#[test]
fn training_beats_the_initial_network() {
    let ts = synthetic();
    let (train, val) = datasets(&ts, ReprKind::Naive, 1, 4);
    let m = build_model(spec(Family::Mlp10, ReprKind::Naive, 1, 15), &mut seeded_rng(9)).unwrap();
    let m = train_model(m, &train, &val, 9).unwrap();
    let first = m.history[0].val_mae;
    let best = m.best_val_mae.unwrap();
    assert!(best < first, "best {best} vs first epoch {first}");
    assert!(m.history.iter().all(|r| r.train_loss.is_finite() && r.val_mae.is_finite()));
}

#[test]
fn patience_stops_training() {
    let ts = synthetic();
    let (train, val) = datasets(&ts, ReprKind::Naive, 1, 20);
    let mut s = spec(Family::Mlp10, ReprKind::Naive, 1, 200);
    s.training.patience = 2;
    let m = train_model(build_model(s, &mut seeded_rng(2)).unwrap(), &train, &val, 2).unwrap();
    let best_epoch = m.history.iter().position(|r| Some(r.val_mae) == m.best_val_mae).unwrap();
    assert!(m.history.len() < 200);
    assert_eq!(m.history.len(), best_epoch + 1 + 2);
}

#[test]
fn linear_family_trains_in_closed_form() {
    let ts = synthetic();
    for kind in [ReprKind::Naive, ReprKind::NaiveDifferences] {
        let (train, val) = datasets(&ts, kind, 24, 3);
        let m = build_model(ModelSpec::new(Family::Linear, kind, 24), &mut seeded_rng(0)).unwrap();
        let m = train_model(m, &train, &val, 0).unwrap();
        let direct = fit_linear(&train, kind.is_differenced()).unwrap();
        let ModelParams::Linear(fitted) = &m.params else { panic!("linear params expected") };
        assert_eq!(fitted, &direct);
        let preds = predict_batch(&m, &val).unwrap();
        for (p, s) in preds.iter().zip(&val) {
            assert_eq!(*p, predict_linear(&direct, s).unwrap());
        }
    }
}

#[test]
fn trained_network_survives_a_checkpoint() {
    let ts = synthetic();
    let (train, val) = datasets(&ts, ReprKind::Reshaped, 1, 40);
    let m = build_model(spec(Family::Cnn, ReprKind::Reshaped, 1, 1), &mut seeded_rng(5)).unwrap();
    let m = train_model(m, &train, &val, 5).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cnn.model");
    save_checkpoint(&path, &m).unwrap();
    let back = load_checkpoint(&path).unwrap();
    assert_eq!(predict_batch(&m, &val).unwrap(), predict_batch(&back, &val).unwrap());
    assert_eq!(val[0].origin_timestamp + Duration::hours(1), val[0].target_timestamp());
}
