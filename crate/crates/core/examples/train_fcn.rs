//! Trains the FCN on synthetic load with the naive-differences
//! representation and reports validation and test MAE.

use reprbench::calendar::{CalendarEncoder, HolidayCalendar};
use reprbench::experiment::{make_dataset, mae, HistoryPolicy, Sample, Split, SplitYears};
use reprbench::models::{build_model, predict_batch, train_model, Family, ModelSpec};
use reprbench::numerics::seeded_rng;
use reprbench::synthetic::{synthetic_demand, SyntheticConfig};
use reprbench::transforms::{ReprKind, ReprLayout};

fn main() {
    let hol = HolidayCalendar::bundled_german();
    let ts = synthetic_demand(&SyntheticConfig::default(), &hol);
    let enc = CalendarEncoder::new(hol, 1);
    let years = SplitYears::default();
    let (kind, h) = (ReprKind::NaiveDifferences, 1);
    let data = |split| {
        make_dataset(&ts, kind, h, split, &years, ReprLayout::default(), HistoryPolicy::DropUncovered, &enc).unwrap()
    };
    let (train, val, test) = (data(Split::Train), data(Split::Val), data(Split::Test));
    println!("{} train / {} val / {} test samples", train.len(), val.len(), test.len());

    let mut spec = ModelSpec::new(Family::Fcn, kind, h);
    spec.training.max_epochs = 15;
    let seed = 1;
    let model = build_model(spec, &mut seeded_rng(seed)).unwrap();
    println!("{} parameters", model.parameter_count());
    let model = train_model(model, &train, &val, seed).unwrap();
    for r in &model.history {
        println!("epoch {:>3}  train L1 {:.4}  val MAE {:.4} GW", r.epoch, r.train_loss, r.val_mae);
    }
    let truth: Vec<f64> = test.iter().map(Sample::target_absolute).collect();
    let pred = predict_batch(&model, &test).unwrap();
    println!("best val MAE {:.4} GW, test MAE {:.4} GW", model.best_val_mae.unwrap(), mae(&truth, &pred).unwrap());
}
