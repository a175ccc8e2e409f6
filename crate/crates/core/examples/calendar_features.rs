//! Eight calendar features for a few target hours around Christmas.

use chrono::{TimeZone, Utc};
use reprbench::calendar::{CalendarEncoder, HolidayCalendar, DEFAULT_TZ_OFFSET_HOURS};

fn main() {
    let enc = CalendarEncoder::new(HolidayCalendar::bundled_german(), DEFAULT_TZ_OFFSET_HOURS);
    println!("{:<17} {:>7} {:>7} {:>7} {:>7} {:>7} {:>7} {:>4} {:>4}", "utc", "h_sin", "h_cos", "d_sin", "d_cos", "y_sin", "y_cos", "wknd", "hol");
    for (d, h) in [(23, 11), (24, 11), (25, 11), (26, 11), (27, 11), (28, 23)] {
        let t = Utc.with_ymd_and_hms(2019, 12, d, h, 0, 0).unwrap();
        let c = enc.encode(t);
        println!(
            "{:<17} {:>7.3} {:>7.3} {:>7.3} {:>7.3} {:>7.3} {:>7.3} {:>4} {:>4}",
            t.format("%Y-%m-%d %H:%M"),
            c.hour_sin,
            c.hour_cos,
            c.dow_sin,
            c.dow_cos,
            c.doy_sin,
            c.doy_cos,
            c.weekend,
            c.holiday
        );
    }
    // 2019-12-28T23:00Z is already Sunday in local time.
}
