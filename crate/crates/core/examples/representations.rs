//! The four history representations at one forecast origin.

use chrono::{TimeZone, Utc};
use reprbench::calendar::HolidayCalendar;
use reprbench::synthetic::{synthetic_demand, SyntheticConfig};
use reprbench::transforms::{build_representation, ReprKind};

fn main() {
    let start = Utc.with_ymd_and_hms(2019, 3, 1, 0, 0, 0).unwrap();
    let ts = synthetic_demand(&SyntheticConfig { start, hours: 24 * 30, ..Default::default() }, &HolidayCalendar::bundled_german());
    let origin = Utc.with_ymd_and_hms(2019, 3, 25, 11, 0, 0).unwrap();
    let k = ts.index_of(origin).expect("origin inside the series");
    let h = 24;
    println!("origin {origin}, x_k = {:.3} GW, horizon {h} h", ts.values()[k]);
    for kind in ReprKind::ALL {
        let r = build_representation(ts.values(), k, kind, h).expect("enough history");
        let head: Vec<String> = r.data.iter().take(4).map(|v| format!("{v:.3}")).collect();
        println!("{:<22} shape {:?} newest first: {} ...", kind.title(), r.shape, head.join(", "));
        if let Some(m) = r.as_matrix() {
            let row: Vec<String> = m.row(1).iter().take(4).map(|v| format!("{v:.3}")).collect();
            println!("{:<22} row 1 (one day earlier): {} ...", "", row.join(", "));
        }
    }
}
