use crate::calendar::CALENDAR_DIM;
use crate::experiment::Sample;
use crate::numerics::gemm::{gemm, View};

use super::ModelError;

/// Diagonal damping added to the normal equations (intercept excluded).
pub const DEFAULT_RIDGE: f64 = 1e-8;

/// `α + Σ β_i h_i + Σ γ_j c_j`, where `h` is the raw or differenced
/// history window and `c` the calendar of the target hour.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearModel {
    pub intercept: f64,
    pub history_weights: Vec<f64>,
    pub calendar_weights: Vec<f64>,
    /// If set the model regresses on `x_{k+h} - x_k`.
    pub differenced: bool,
    pub horizon: usize,
}

impl LinearModel {
    /// Raw regression output: the level, or the difference when `differenced`.
    pub fn regress(&self, s: &Sample) -> Result<f64, ModelError> {
        self.check(s)?;
        let cal = s.calendar.to_array();
        let h: f64 = self.history_weights.iter().zip(&s.repr.data).map(|(w, x)| w * x).sum();
        let c: f64 = self.calendar_weights.iter().zip(&cal).map(|(w, x)| w * x).sum();
        Ok(self.intercept + h + c)
    }

    fn check(&self, s: &Sample) -> Result<(), ModelError> {
        if s.repr.kind.is_matrix()
            || s.repr.kind.is_differenced() != self.differenced
            || s.repr.len() != self.history_weights.len()
        {
            let model = if self.differenced { "differenced linear model" } else { "linear model" };
            return Err(ModelError::ReprMismatch { model: model.into(), repr: s.repr.kind });
        }
        Ok(())
    }
}

pub fn fit_linear(samples: &[Sample], differenced: bool) -> Result<LinearModel, ModelError> {
    fit_linear_with(samples, differenced, DEFAULT_RIDGE)
}

/// Least squares on `[1 | history | calendar]` with `lambda` added to
/// every diagonal entry except the intercept's.
///
/// The intercept is eliminated by centring features and target, the
/// remaining system is Jacobi-scaled and solved by Cholesky.
pub fn fit_linear_with(samples: &[Sample], differenced: bool, lambda: f64) -> Result<LinearModel, ModelError> {
    let first = samples.first().ok_or(ModelError::EmptyTrainingSet)?;
    let window = first.repr.len();
    let horizon = first.horizon;
    for s in samples {
        if s.repr.kind.is_matrix() || s.repr.kind.is_differenced() != differenced || s.repr.len() != window {
            let model = if differenced { "differenced linear model" } else { "linear model" };
            return Err(ModelError::ReprMismatch { model: model.into(), repr: s.repr.kind });
        }
    }
    if !(lambda >= 0.0) {
        return Err(ModelError::InvalidConfig(format!("ridge {lambda} must be non-negative")));
    }
    let p = window + CALENDAR_DIM;
    let n = samples.len();

    let mut x = Vec::with_capacity(n * p);
    let mut y = Vec::with_capacity(n);
    for s in samples {
        x.extend_from_slice(&s.repr.data);
        x.extend_from_slice(&s.calendar.to_array());
        y.push(if differenced { s.target_delta() } else { s.target_absolute() });
    }
    let mut mu = vec![0.0; p];
    for row in x.chunks_exact(p) {
        for (m, v) in mu.iter_mut().zip(row) {
            *m += v;
        }
    }
    mu.iter_mut().for_each(|m| *m /= n as f64);
    let y_bar = y.iter().sum::<f64>() / n as f64;
    for row in x.chunks_exact_mut(p) {
        for (v, m) in row.iter_mut().zip(&mu) {
            *v -= m;
        }
    }
    y.iter_mut().for_each(|v| *v -= y_bar);

    let mut a = vec![0.0; p * p];
    gemm(p, n, p, View::transposed(&x, p), View::row_major(&x, p), 0.0, &mut a);
    let mut b = vec![0.0; p];
    gemm(p, n, 1, View::transposed(&x, p), View::row_major(&y, 1), 0.0, &mut b);
    for i in 0..p {
        a[i * p + i] += lambda;
    }

    // Columns with zero variance and no damping have a zero diagonal; they
    // get weight 0.
    let scale: Vec<f64> = (0..p).map(|i| if a[i * p + i] > 0.0 { 1.0 / a[i * p + i].sqrt() } else { 0.0 }).collect();
    for i in 0..p {
        for j in 0..p {
            a[i * p + j] *= scale[i] * scale[j];
        }
        if scale[i] == 0.0 {
            a[i * p + i] = 1.0;
        }
        b[i] *= scale[i];
    }
    let z = cholesky_solve(&mut a, &b, p).ok_or(ModelError::SingularSystem)?;
    let beta: Vec<f64> = z.iter().zip(&scale).map(|(z, s)| z * s).collect();
    let intercept = y_bar - beta.iter().zip(&mu).map(|(b, m)| b * m).sum::<f64>();

    Ok(LinearModel {
        intercept,
        history_weights: beta[..window].to_vec(),
        calendar_weights: beta[window..].to_vec(),
        differenced,
        horizon,
    })
}

/// Forecast of `x_{k+h}` in GW, reconstructing differences as `x_k + Δ̂`.
pub fn predict_linear(m: &LinearModel, s: &Sample) -> Result<f64, ModelError> {
    let r = m.regress(s)?;
    Ok(if m.differenced { s.x_k + r } else { r })
}

/// Solves `A z = b` for symmetric positive definite `A`, overwriting `A`
/// with its Cholesky factor.
fn cholesky_solve(a: &mut [f64], b: &[f64], n: usize) -> Option<Vec<f64>> {
    for j in 0..n {
        let mut d = a[j * n + j];
        for k in 0..j {
            d -= a[j * n + k] * a[j * n + k];
        }
        if !(d > 0.0) {
            return None;
        }
        let d = d.sqrt();
        a[j * n + j] = d;
        for i in j + 1..n {
            let mut s = a[i * n + j];
            for k in 0..j {
                s -= a[i * n + k] * a[j * n + k];
            }
            a[i * n + j] = s / d;
        }
    }
    let mut z = b.to_vec();
    for i in 0..n {
        for k in 0..i {
            z[i] -= a[i * n + k] * z[k];
        }
        z[i] /= a[i * n + i];
    }
    for i in (0..n).rev() {
        for k in i + 1..n {
            z[i] -= a[k * n + i] * z[k];
        }
        z[i] /= a[i * n + i];
    }
    Some(z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calendar::CalendarEncoder;
    use crate::experiment::build_sample;
    use crate::ingest::TimeSeries;
    use crate::transforms::{ReprKind, ReprLayout};
    use chrono::{TimeZone, Utc};

    fn samples(values: Vec<f64>, kind: ReprKind, h: usize) -> Vec<Sample> {
        let start = Utc.with_ymd_and_hms(2019, 1, 1, 0, 0, 0).unwrap();
        let ts = TimeSeries::hourly("t", start, values);
        let enc = CalendarEncoder::default();
        let layout = ReprLayout::default();
        let first = layout.window - 1 + if kind.is_differenced() { h } else { 0 };
        (first..ts.len() - h).map(|k| build_sample(&ts, k, kind, h, layout, &enc).unwrap()).collect()
    }

    #[test]
    fn constant_series_forecasts_constant() {
        for kind in [ReprKind::Naive, ReprKind::NaiveDifferences] {
            let s = samples(vec![55.0; 500], kind, 24);
            let m = fit_linear(&s, kind.is_differenced()).unwrap();
            for x in &s {
                assert!((predict_linear(&m, x).unwrap() - 55.0).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn prediction_examples() {
        let s = &samples(vec![60.0; 300], ReprKind::NaiveDifferences, 1)[0];
        let mut m = LinearModel {
            intercept: 0.0,
            history_weights: vec![0.0; 168],
            calendar_weights: vec![0.0; 8],
            differenced: true,
            horizon: 1,
        };
        assert_eq!(predict_linear(&m, s).unwrap(), 60.0);
        m.intercept = 1.5;
        assert_eq!(predict_linear(&m, s).unwrap(), 61.5);
        m.differenced = false;
        assert!(matches!(predict_linear(&m, s), Err(ModelError::ReprMismatch { .. })));
        let s = &samples(vec![60.0; 300], ReprKind::Naive, 1)[0];
        m.intercept = 5.0;
        assert_eq!(predict_linear(&m, s).unwrap(), 5.0);
    }

    #[test]
    fn rejects_matrix_and_empty() {
        let s = samples(vec![1.0; 300], ReprKind::Reshaped, 1);
        assert!(matches!(fit_linear(&s, false), Err(ModelError::ReprMismatch { .. })));
        assert!(matches!(fit_linear(&[], false), Err(ModelError::EmptyTrainingSet)));
    }

    #[test]
    fn cholesky_small() {
        let mut a = vec![4.0, 2.0, 2.0, 3.0];
        let z = cholesky_solve(&mut a, &[2.0, 1.0], 2).unwrap();
        assert!((z[0] - 0.5).abs() < 1e-15 && z[1].abs() < 1e-15);
        let mut singular = vec![1.0, 1.0, 1.0, 1.0];
        assert!(cholesky_solve(&mut singular, &[1.0, 1.0], 2).is_none());
    }
}
