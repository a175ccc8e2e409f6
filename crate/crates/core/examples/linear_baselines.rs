//! The two linear baselines, fitted on train+val and scored on the test
//! year, at the three benchmark horizons.

use reprbench::calendar::{CalendarEncoder, HolidayCalendar};
use reprbench::experiment::{make_dataset, mae, HistoryPolicy, Sample, Split, SplitYears};
use reprbench::models::{fit_linear, predict_linear};
use reprbench::synthetic::{synthetic_demand, SyntheticConfig};
use reprbench::transforms::{ReprKind, ReprLayout};

fn main() {
    let hol = HolidayCalendar::bundled_german();
    let ts = synthetic_demand(&SyntheticConfig::default(), &hol);
    let enc = CalendarEncoder::new(hol, 1);
    let years = SplitYears::default();
    println!("{:>8} {:>10} {:>18}", "horizon", "naive", "naive differences");
    for h in [1, 24, 168] {
        let mut row = Vec::new();
        for kind in [ReprKind::Naive, ReprKind::NaiveDifferences] {
            let data = |split| {
                make_dataset(&ts, kind, h, split, &years, ReprLayout::default(), HistoryPolicy::DropUncovered, &enc)
                    .unwrap()
            };
            let mut train = data(Split::Train);
            train.extend(data(Split::Val));
            let test = data(Split::Test);
            let m = fit_linear(&train, kind.is_differenced()).unwrap();
            let pred: Vec<f64> = test.iter().map(|s| predict_linear(&m, s).unwrap()).collect();
            let truth: Vec<f64> = test.iter().map(Sample::target_absolute).collect();
            row.push(mae(&truth, &pred).unwrap());
        }
        println!("{:>6} h {:>10.4} {:>18.4}", h, row[0], row[1]);
    }
}
