//! Synthetic hourly demand with daily, weekly and seasonal structure, for
//! demos and tests when the real load series is not at hand.

use chrono::{DateTime, Datelike, Duration, TimeZone, Timelike, Utc, Weekday};
use rand_distr::{Distribution, Normal};

use crate::calendar::HolidayCalendar;
use crate::ingest::TimeSeries;
use crate::numerics::seeded_rng;

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticConfig {
    pub start: DateTime<Utc>,
    pub hours: usize,
    /// Mean level in GW.
    pub base_gw: f64,
    pub daily_amplitude: f64,
    /// Fractional drop on Saturdays; Sundays and holidays drop twice as much.
    pub weekend_drop: f64,
    /// Winter peak above the summer trough, in GW.
    pub seasonal_amplitude: f64,
    /// Innovation std of the AR(1) noise, in GW.
    pub noise_std: f64,
    pub noise_ar: f64,
    pub tz_offset_hours: i32,
    pub seed: u64,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        let start = Utc.with_ymd_and_hms(2014, 12, 1, 0, 0, 0).unwrap();
        let end = Utc.with_ymd_and_hms(2020, 1, 1, 0, 0, 0).unwrap();
        Self {
            start,
            hours: (end - start).num_hours() as usize,
            base_gw: 56.0,
            daily_amplitude: 9.0,
            weekend_drop: 0.1,
            seasonal_amplitude: 7.0,
            noise_std: 0.35,
            noise_ar: 0.9,
            tz_offset_hours: 1,
            seed: 7,
        }
    }
}

/// An hourly series in GW named `synthetic`.
pub fn synthetic_demand(cfg: &SyntheticConfig, holidays: &HolidayCalendar) -> TimeSeries {
    let mut rng = seeded_rng(cfg.seed);
    let noise = Normal::new(0.0, cfg.noise_std.max(0.0)).expect("finite std");
    let tau = std::f64::consts::TAU;
    let mut e = 0.0;
    let values = (0..cfg.hours)
        .map(|i| {
            let local = cfg.start + Duration::hours(i as i64 + cfg.tz_offset_hours as i64);
            let hour = local.hour() as f64;
            let daily = 0.65 * (tau * (hour - 8.0) / 24.0).sin() + 0.35 * (2.0 * tau * (hour - 10.0) / 24.0).sin();
            let day_off = holidays.contains(local.date_naive()) || local.weekday() == Weekday::Sun;
            let drop = if day_off {
                2.0 * cfg.weekend_drop
            } else if local.weekday() == Weekday::Sat {
                cfg.weekend_drop
            } else {
                0.0
            };
            let season = 0.5 * cfg.seasonal_amplitude * (tau * (local.ordinal() as f64 - 15.0) / 365.25).cos();
            e = cfg.noise_ar * e + noise.sample(&mut rng);
            let level = cfg.base_gw + season + cfg.daily_amplitude * daily * (1.0 - drop);
            level * (1.0 - drop) + e
        })
        .collect();
    TimeSeries::hourly("synthetic", cfg.start, values)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_structured() {
        let cfg = SyntheticConfig { hours: 24 * 28, ..SyntheticConfig::default() };
        let hol = HolidayCalendar::bundled_german();
        let a = synthetic_demand(&cfg, &hol);
        assert_eq!(a, synthetic_demand(&cfg, &hol));
        assert_eq!(a.len(), 24 * 28);
        assert!(a.values().iter().all(|v| v.is_finite() && *v > 20.0 && *v < 90.0));
        let b = synthetic_demand(&SyntheticConfig { seed: 8, ..cfg.clone() }, &hol);
        assert_ne!(a.values(), b.values());
    }

    #[test]
    fn noise_free_weekday_repeats() {
        let cfg = SyntheticConfig {
            start: Utc.with_ymd_and_hms(2019, 3, 4, 0, 0, 0).unwrap(),
            hours: 24 * 14,
            noise_std: 0.0,
            seasonal_amplitude: 0.0,
            ..SyntheticConfig::default()
        };
        let ts = synthetic_demand(&cfg, &HolidayCalendar::new([]));
        let v = ts.values();
        for i in 0..24 * 7 {
            assert!((v[i] - v[i + 24 * 7]).abs() < 1e-9);
        }
        // Sunday below Saturday below Monday at noon.
        let noon = |day: usize| v[day * 24 + 11];
        assert!(noon(6) < noon(5) && noon(5) < noon(0));
    }
}
