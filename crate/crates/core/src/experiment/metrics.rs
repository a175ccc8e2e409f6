use std::fmt;

#[derive(Debug, Clone, PartialEq)]
pub enum MetricError {
    LengthMismatch { truth: usize, pred: usize },
    EmptyInput,
    DivisionByZero,
}

impl fmt::Display for MetricError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MetricError::LengthMismatch { truth, pred } => {
                write!(f, "{truth} ground-truth values vs {pred} predictions")
            }
            MetricError::EmptyInput => write!(f, "empty input"),
            MetricError::DivisionByZero => write!(f, "reference MAE must be positive"),
        }
    }
}

impl std::error::Error for MetricError {}

/// Mean absolute error `Σ|y - ŷ| / N`.
pub fn mae(y: &[f64], y_hat: &[f64]) -> Result<f64, MetricError> {
    if y.len() != y_hat.len() {
        return Err(MetricError::LengthMismatch { truth: y.len(), pred: y_hat.len() });
    }
    if y.is_empty() {
        return Err(MetricError::EmptyInput);
    }
    Ok(y.iter().zip(y_hat).map(|(a, b)| (a - b).abs()).sum::<f64>() / y.len() as f64)
}

/// `mae_compare / mae_naive - 1`, as a fraction (multiply by 100 for percent).
pub fn relative_advantage(mae_compare: f64, mae_naive: f64) -> Result<f64, MetricError> {
    if mae_naive <= 0.0 || !mae_naive.is_finite() {
        return Err(MetricError::DivisionByZero);
    }
    Ok(mae_compare / mae_naive - 1.0)
}

/// Mean and population standard deviation (divisor `n`).
pub fn mean_std(xs: &[f64]) -> Result<(f64, f64), MetricError> {
    if xs.is_empty() {
        return Err(MetricError::EmptyInput);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
    Ok((mean, var.sqrt()))
}
