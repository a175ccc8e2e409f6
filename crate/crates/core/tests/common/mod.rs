//! Independent oracles and fixtures shared by the integration and
//! acceptance tests. Nothing here calls the solver being checked.

#![allow(dead_code)]

use std::path::{Path, PathBuf};

use chrono::{DateTime, Duration, TimeZone, Utc};
use rand::Rng as _;
use reprbench::calendar::{CalendarVector, HolidayCalendar};
use reprbench::experiment::Sample;
use reprbench::ingest::{write_demand_csv, IngestConfig, TimeSeries};
use reprbench::models::{batch_loss, batch_loss_and_grad, TrainedModel};
use reprbench::numerics::seeded_rng;
use reprbench::synthetic::{synthetic_demand, SyntheticConfig};
use reprbench::transforms::{Matrix, ReprInput, ReprKind};

pub fn utc(y: i32, m: u32, d: u32, h: u32) -> DateTime<Utc> {
    Utc.with_ymd_and_hms(y, m, d, h, 0, 0).unwrap()
}

/// Samples with arbitrary (not series-derived) history and calendar values.
pub fn random_samples(n: usize, window: usize, kind: ReprKind, seed: u64) -> Vec<Sample> {
    let mut rng = seeded_rng(seed);
    (0..n)
        .map(|i| {
            let data: Vec<f64> = (0..window).map(|_| rng.gen_range(-3.0..3.0)).collect();
            let mut cal = [0.0; 8];
            for c in cal.iter_mut() {
                *c = rng.gen_range(-1.0..1.0);
            }
            let x_k = rng.gen_range(40.0..70.0);
            let target = x_k + rng.gen_range(-5.0..5.0);
            Sample::new(
                ReprInput { data, kind, shape: vec![window], origin_index: i, horizon: 1 },
                CalendarVector::from_array(cal),
                x_k,
                target,
                1,
                utc(2019, 1, 1, 0) + Duration::hours(i as i64),
            )
        })
        .collect()
}

/// Solves `A x = b` by Gaussian elimination with partial pivoting.
pub fn gauss_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs())).unwrap();
        a.swap(col, piv);
        b.swap(col, piv);
        for r in col + 1..n {
            let f = a[r][col] / a[col][col];
            for c in col..n {
                a[r][c] -= f * a[col][c];
            }
            b[r] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|c| a[r][c] * x[c]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    x
}

/// `[α, β…, γ…]` from the explicit normal equations
/// `(XᵀX + λ·diag(0, 1, …, 1)) w = Xᵀy` on the raw design `[1 | h | c]`.
pub fn normal_equations_oracle(samples: &[Sample], differenced: bool, lambda: f64) -> Vec<f64> {
    let rows: Vec<Vec<f64>> = samples
        .iter()
        .map(|s| {
            let mut r = vec![1.0];
            r.extend_from_slice(&s.repr.data);
            r.extend_from_slice(&s.calendar.to_array());
            r
        })
        .collect();
    let y: Vec<f64> =
        samples.iter().map(|s| if differenced { s.target_absolute() - s.x_k } else { s.target_absolute() }).collect();
    let p = rows[0].len();
    let mut a = vec![vec![0.0; p]; p];
    let mut b = vec![0.0; p];
    for (r, t) in rows.iter().zip(&y) {
        for i in 0..p {
            b[i] += r[i] * t;
            for j in 0..p {
                a[i][j] += r[i] * r[j];
            }
        }
    }
    for (i, row) in a.iter_mut().enumerate().skip(1) {
        row[i] += lambda;
    }
    gauss_solve(a, b)
}

/// Top-`k` eigenpairs of the sample covariance (divisor n − 1) by power
/// iteration with Hotelling deflation. Vectors follow the
/// largest-magnitude-entry-positive sign convention.
pub fn power_iteration_pca(points: &[Vec<f64>], k: usize) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = points.len();
    let d = points[0].len();
    let mean: Vec<f64> = (0..d).map(|j| points.iter().map(|p| p[j]).sum::<f64>() / n as f64).collect();
    let mut cov = vec![vec![0.0; d]; d];
    for p in points {
        for a in 0..d {
            for b in 0..d {
                cov[a][b] += (p[a] - mean[a]) * (p[b] - mean[b]) / (n - 1) as f64;
            }
        }
    }
    let mut values = Vec::new();
    let mut vectors = Vec::new();
    for c in 0..k {
        let mut v: Vec<f64> = (0..d).map(|j| 1.0 + 0.1 * (j + c) as f64).collect();
        let mut lambda = 0.0;
        for _ in 0..200_000 {
            let w: Vec<f64> = (0..d).map(|i| (0..d).map(|j| cov[i][j] * v[j]).sum()).collect();
            let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
            let next: Vec<f64> = w.iter().map(|x| x / norm).collect();
            let delta = next.iter().zip(&v).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            v = next;
            lambda = norm;
            if delta < 1e-15 {
                break;
            }
        }
        let pivot = (0..d).max_by(|&i, &j| v[i].abs().total_cmp(&v[j].abs())).unwrap();
        if v[pivot] < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
        for a in 0..d {
            for b in 0..d {
                cov[a][b] -= lambda * v[a] * v[b];
            }
        }
        values.push(lambda);
        vectors.push(v);
    }
    (values, vectors)
}

/// Minimum within-cluster sum of squares over every assignment of the
/// points to `k` non-empty clusters.
pub fn brute_force_kmeans_cost(points: &Matrix, k: usize) -> f64 {
    let n = points.rows();
    let d = points.cols();
    let mut labels = vec![0usize; n];
    let mut best = f64::INFINITY;
    loop {
        let mut counts = vec![0usize; k];
        let mut sums = vec![vec![0.0; d]; k];
        for (i, &l) in labels.iter().enumerate() {
            counts[l] += 1;
            for j in 0..d {
                sums[l][j] += points.get(i, j);
            }
        }
        if counts.iter().all(|&c| c > 0) {
            let cost: f64 = labels
                .iter()
                .enumerate()
                .map(|(i, &l)| (0..d).map(|j| (points.get(i, j) - sums[l][j] / counts[l] as f64).powi(2)).sum::<f64>())
                .sum();
            best = best.min(cost);
        }
        let mut pos = 0;
        loop {
            if pos == n {
                return best;
            }
            labels[pos] += 1;
            if labels[pos] < k {
                break;
            }
            labels[pos] = 0;
            pos += 1;
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct GradCheck {
    pub checked: usize,
    pub max_rel_error: f64,
    /// (tensor index, element index) of the worst parameter.
    pub worst: (usize, usize),
    /// Parameters whose difference stencil straddles a ReLU or L1 kink.
    pub kinks: usize,
}

pub fn rel_error(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale < 1e-12 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

/// Compares reverse-mode gradients of the training loss with central
/// differences of step `eps`. `select(t, j)` chooses which parameters to
/// check.
///
/// The loss is piecewise linear in every parameter, so a nonzero second
/// difference marks a kink inside the stencil; such points are counted in
/// `kinks` so callers can redraw.
pub fn gradient_check(
    model: &TrainedModel,
    samples: &[Sample],
    eps: f64,
    mut select: impl FnMut(usize, usize) -> bool,
) -> GradCheck {
    let (centre, grads) = batch_loss_and_grad(model, samples, true).unwrap();
    let mut m = model.clone();
    let mut out = GradCheck { checked: 0, max_rel_error: 0.0, worst: (0, 0), kinks: 0 };
    for (t, g) in grads.iter().enumerate() {
        for (j, &analytic) in g.iter().enumerate() {
            if !select(t, j) {
                continue;
            }
            let orig = m.network_params().unwrap()[t].value.data()[j];
            m.network_params_mut().unwrap()[t].value.data_mut()[j] = orig + eps;
            let up = batch_loss(&m, samples).unwrap();
            m.network_params_mut().unwrap()[t].value.data_mut()[j] = orig - eps;
            let down = batch_loss(&m, samples).unwrap();
            m.network_params_mut().unwrap()[t].value.data_mut()[j] = orig;
            let numeric = (up - down) / (2.0 * eps);
            if (up - 2.0 * centre + down).abs() > 1e-10 * centre.abs().max(1.0) {
                out.kinks += 1;
            }
            let e = rel_error(analytic, numeric);
            out.checked += 1;
            if e > out.max_rel_error {
                out.max_rel_error = e;
                out.worst = (t, j);
            }
        }
    }
    out
}

/// Runs `check` on successive random draws until one has no kink inside
/// any stencil, up to `max_draws`. Returns the draw index and its result.
pub fn kink_free_check(max_draws: u64, mut check: impl FnMut(u64) -> GradCheck) -> (u64, GradCheck) {
    let mut last = None;
    for draw in 0..max_draws {
        let r = check(draw);
        if r.kinks == 0 {
            return (draw, r);
        }
        last = Some((draw, r));
    }
    last.expect("at least one draw")
}

/// Randomises every bias of a freshly built network so no unit sits at
/// exactly zero pre-activation.
pub fn randomize_biases(model: &mut TrainedModel, seed: u64) {
    let mut rng = seeded_rng(seed);
    for p in model.network_params_mut().unwrap() {
        if p.value.rank() == 1 {
            for b in p.value.data_mut() {
                *b = rng.gen_range(-0.5..0.5);
            }
        }
    }
}

/// Samples whose targets sit far above any plausible network output, so the
/// L1 loss stays away from its kink.
pub fn gradcheck_samples(kind: ReprKind, rows: usize, cols: usize, n: usize, seed: u64) -> Vec<Sample> {
    let mut s = random_samples(n, rows * cols, kind, seed);
    for x in &mut s {
        if kind.is_matrix() {
            x.repr.shape = vec![rows, cols];
        }
        if kind.is_differenced() {
            x.set_target(x.x_k + 25.0);
        } else {
            x.x_k = 0.0;
            x.set_target(25.0);
        }
    }
    s
}

/// Synthetic series written in the loader's CSV layout (values in MW).
pub fn write_fixture(dir: &Path, start: DateTime<Utc>, end: DateTime<Utc>, seed: u64) -> (PathBuf, TimeSeries) {
    let cfg = SyntheticConfig { start, hours: (end - start).num_hours() as usize, seed, ..SyntheticConfig::default() };
    let ts = synthetic_demand(&cfg, &HolidayCalendar::bundled_german());
    let path = dir.join("demand.csv");
    let d = IngestConfig::default();
    write_demand_csv(std::fs::File::create(&path).unwrap(), &ts, &d.column_name, d.unit_scale).unwrap();
    (path, ts)
}
