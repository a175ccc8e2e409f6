//! Trains a small MLP briefly, writes it to a text checkpoint and checks
//! the reloaded model forecasts identically.

use reprbench::calendar::{CalendarEncoder, HolidayCalendar};
use reprbench::experiment::{make_dataset, HistoryPolicy, Split, SplitYears};
use reprbench::models::{build_model, load_checkpoint, predict_batch, save_checkpoint, train_model, Family, ModelSpec};
use reprbench::numerics::seeded_rng;
use reprbench::synthetic::{synthetic_demand, SyntheticConfig};
use reprbench::transforms::{ReprKind, ReprLayout};

fn main() {
    let hol = HolidayCalendar::bundled_german();
    let ts = synthetic_demand(&SyntheticConfig::default(), &hol);
    let enc = CalendarEncoder::new(hol, 1);
    let data = |split| {
        make_dataset(&ts, ReprKind::Naive, 24, split, &SplitYears::default(), ReprLayout::default(), HistoryPolicy::DropUncovered, &enc)
            .unwrap()
    };
    let (train, val) = (data(Split::Train), data(Split::Val));
    let mut spec = ModelSpec::new(Family::Mlp10, ReprKind::Naive, 24);
    spec.training.max_epochs = 3;
    let model = train_model(build_model(spec, &mut seeded_rng(4)).unwrap(), &train, &val, 4).unwrap();

    let path = std::env::temp_dir().join("reprbench-mlp10.model");
    save_checkpoint(&path, &model).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    println!("wrote {} ({} bytes); header:", path.display(), text.len());
    for line in text.lines().take(8) {
        println!("  {}", if line.len() > 90 { &line[..90] } else { line });
    }
    let back = load_checkpoint(&path).unwrap();
    let same = predict_batch(&model, &val).unwrap() == predict_batch(&back, &val).unwrap();
    println!("reloaded forecasts identical: {same}");
    std::fs::remove_file(&path).ok();
}
