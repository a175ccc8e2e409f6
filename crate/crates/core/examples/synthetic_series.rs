//! Generates the synthetic demand series, writes it in the loader's CSV
//! layout and prints its weekly shape.

use reprbench::calendar::HolidayCalendar;
use reprbench::ingest::{load_hourly_series, write_demand_csv, IngestConfig};
use reprbench::synthetic::{synthetic_demand, SyntheticConfig};

fn main() {
    let hol = HolidayCalendar::bundled_german();
    let cfg = SyntheticConfig::default();
    let ts = synthetic_demand(&cfg, &hol);
    let path = std::env::temp_dir().join("reprbench-synthetic.csv");
    let ingest = IngestConfig::default();
    write_demand_csv(std::fs::File::create(&path).unwrap(), &ts, &ingest.column_name, ingest.unit_scale).unwrap();
    let back = load_hourly_series(&path, &ingest).unwrap();
    println!("{} hours from {} written to {}", ts.len(), cfg.start, path.display());
    println!("reloaded {} hours, first value {:.3} GW", back.len(), back.values()[0]);

    // Mean by hour of week over the whole series.
    let mut sums = [0.0; 168];
    let mut counts = [0usize; 168];
    for (i, v) in ts.values().iter().enumerate() {
        sums[i % 168] += v;
        counts[i % 168] += 1;
    }
    for day in 0..7 {
        let row: Vec<String> = (0..24).step_by(3).map(|h| format!("{:5.1}", sums[day * 24 + h] / counts[day * 24 + h] as f64)).collect();
        println!("day {day}: {}", row.join(" "));
    }
    std::fs::remove_file(&path).ok();
}
