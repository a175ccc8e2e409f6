//! Selection, aggregation, convolution, rescaling, k-means and PCA on one
//! week of synthetic load.

use chrono::{TimeZone, Utc};
use reprbench::calendar::HolidayCalendar;
use reprbench::synthetic::{synthetic_demand, SyntheticConfig};
use reprbench::transforms::{
    aggregate, convolve1d, convolve2d, kmeans, pca, rescale_linear, reshape, select, AggFn, Axis, Matrix,
};

fn fmt(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:.2}")).collect::<Vec<_>>().join(" ")
}

fn main() {
    let start = Utc.with_ymd_and_hms(2019, 6, 3, 0, 0, 0).unwrap();
    let ts = synthetic_demand(&SyntheticConfig { start, hours: 168, ..Default::default() }, &HolidayCalendar::bundled_german());
    let week = reshape(ts.values(), 7, 24).unwrap();

    println!("noon of each day:   {}", fmt(&select(ts.values(), &[11, 35, 59, 83, 107, 131, 155]).unwrap()));
    println!("daily mean:         {}", fmt(&aggregate(&week, Axis::Rows, AggFn::Mean).unwrap()));
    println!("daily peak:         {}", fmt(&aggregate(&week, Axis::Rows, AggFn::Max).unwrap()));
    let smooth = convolve1d(&ts.values()[..24], &[0.25, 0.5, 0.25]).unwrap();
    println!("smoothed first day: {}", fmt(&smooth[..8]));
    let edge = Matrix::new(1, 2, vec![-1.0, 1.0]).unwrap();
    println!("hour-to-hour ramp on Monday: {}", fmt(&convolve2d(&week, &edge).unwrap().row(0)[..8]));
    println!("Monday at 6 points: {}", fmt(&rescale_linear(week.row(0), 6).unwrap()));

    let days = kmeans(&week, 2, 1, 100).unwrap();
    println!("k-means day clusters (Mon..Sun): {:?}, cost {:.2}", days.assignments, days.cost);
    let p = pca(&week, 2).unwrap();
    println!("PCA variance ratio of daily profiles: {}", fmt(&p.explained_variance_ratio));
    println!("first component scores (Mon..Sun): {}", fmt(&(0..7).map(|d| p.projected.get(d, 0)).collect::<Vec<_>>()));
}
