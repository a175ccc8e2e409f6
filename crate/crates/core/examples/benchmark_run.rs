//! A reduced benchmark: all four representations at one horizon, three
//! seeds, a few epochs, rendered as the markdown results table.

use reprbench::calendar::HolidayCalendar;
use reprbench::experiment::{render_markdown, run_experiment_with_progress, ExperimentConfig, Progress};
use reprbench::models::TrainingConfig;
use reprbench::synthetic::{synthetic_demand, SyntheticConfig};

fn main() {
    let hol = HolidayCalendar::bundled_german();
    let ts = synthetic_demand(&SyntheticConfig::default(), &hol);
    let cfg = ExperimentConfig {
        horizons: vec![24],
        seeds: vec![1, 2, 3],
        training: TrainingConfig { max_epochs: 3, ..TrainingConfig::default() },
        jobs: std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1),
        ..ExperimentConfig::default()
    };
    let report = run_experiment_with_progress(&cfg, &ts, &hol, &|p| match p {
        Progress::Baseline(b) => eprintln!("baselines h={}: {:.4} / {:.4}", b.horizon, b.naive_mae, b.differences_mae),
        Progress::Run(r) => eprintln!("{} h={} seed {}: {:.4} GW", r.repr, r.horizon, r.seed, r.test_mae),
    })
    .unwrap();
    print!("{}", render_markdown(&report));
}
