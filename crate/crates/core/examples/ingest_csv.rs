//! Reads an hourly load CSV in the OPSD single-index layout, fills a short
//! gap and rejects a long one.

use reprbench::ingest::{read_demand_csv, validate_hourly, IngestConfig};

const CSV: &str = "\
utc_timestamp,cet_cest_timestamp,DE_load_actual_entsoe_transparency
2019-01-01T00:00:00Z,2019-01-01T01:00:00+0100,42010
2019-01-01T01:00:00Z,2019-01-01T02:00:00+0100,40500
2019-01-01T02:00:00Z,2019-01-01T03:00:00+0100,
2019-01-01T03:00:00Z,2019-01-01T04:00:00+0100,
2019-01-01T04:00:00Z,2019-01-01T05:00:00+0100,39100
2019-01-01T05:00:00Z,2019-01-01T06:00:00+0100,39800
";

fn main() {
    let cfg = IngestConfig::default();
    let raw = read_demand_csv(CSV.as_bytes(), &cfg).expect("readable csv");
    println!("{} rows read from column {} (GW):", raw.len(), raw.name);
    let filled = validate_hourly(&raw, cfg.max_gap_fill_hours).expect("gap of two hours is fillable");
    for (t, v) in filled.timestamps().iter().zip(filled.values()) {
        println!("  {} {v:.3}", t.format("%Y-%m-%d %H:%M"));
    }
    match validate_hourly(&raw, 1) {
        Ok(_) => println!("unexpectedly accepted"),
        Err(e) => println!("with max_gap_fill_hours = 1: {e}"),
    }
}
