use super::{Matrix, TransformError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    /// Reduce each row to one value (r x c -> r).
    Rows,
    /// Reduce each column to one value (r x c -> c).
    Cols,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AggFn {
    Mean,
    Sum,
    Min,
    Max,
}

impl AggFn {
    fn apply(self, it: impl Iterator<Item = f64> + Clone) -> f64 {
        match self {
            AggFn::Sum => it.sum(),
            AggFn::Mean => {
                let n = it.clone().count();
                it.sum::<f64>() / n as f64
            }
            AggFn::Min => it.fold(f64::INFINITY, f64::min),
            AggFn::Max => it.fold(f64::NEG_INFINITY, f64::max),
        }
    }
}

/// Elements at `indices`, in the given order.
pub fn select(v: &[f64], indices: &[usize]) -> Result<Vec<f64>, TransformError> {
    indices
        .iter()
        .map(|&i| v.get(i).copied().ok_or(TransformError::IndexOutOfBounds { index: i, len: v.len() }))
        .collect()
}

/// Sub-matrix of the given rows and columns.
pub fn select_matrix(m: &Matrix, rows: &[usize], cols: &[usize]) -> Result<Matrix, TransformError> {
    for &r in rows {
        if r >= m.rows() {
            return Err(TransformError::IndexOutOfBounds { index: r, len: m.rows() });
        }
    }
    for &c in cols {
        if c >= m.cols() {
            return Err(TransformError::IndexOutOfBounds { index: c, len: m.cols() });
        }
    }
    let data = rows.iter().flat_map(|&r| cols.iter().map(move |&c| m.get(r, c))).collect();
    Matrix::new(rows.len(), cols.len(), data)
}

pub fn aggregate(m: &Matrix, axis: Axis, f: AggFn) -> Result<Vec<f64>, TransformError> {
    if m.rows() == 0 || m.cols() == 0 {
        return Err(TransformError::EmptyInput);
    }
    Ok(match axis {
        Axis::Rows => (0..m.rows()).map(|r| f.apply(m.row(r).iter().copied())).collect(),
        Axis::Cols => (0..m.cols()).map(|c| f.apply((0..m.rows()).map(move |r| m.get(r, c)))).collect(),
    })
}

/// Valid cross-correlation with stride 1; output length `n - m + 1`.
pub fn convolve1d(v: &[f64], kernel: &[f64]) -> Result<Vec<f64>, TransformError> {
    if kernel.is_empty() {
        return Err(TransformError::EmptyInput);
    }
    if kernel.len() > v.len() {
        return Err(TransformError::KernelTooLarge);
    }
    Ok(v.windows(kernel.len()).map(|w| w.iter().zip(kernel).map(|(a, b)| a * b).sum()).collect())
}

/// Two-dimensional valid cross-correlation with stride 1.
pub fn convolve2d(m: &Matrix, kernel: &Matrix) -> Result<Matrix, TransformError> {
    if kernel.rows() == 0 || kernel.cols() == 0 {
        return Err(TransformError::EmptyInput);
    }
    if kernel.rows() > m.rows() || kernel.cols() > m.cols() {
        return Err(TransformError::KernelTooLarge);
    }
    let (oh, ow) = (m.rows() - kernel.rows() + 1, m.cols() - kernel.cols() + 1);
    let mut out = Matrix::zeros(oh, ow);
    for y in 0..oh {
        for x in 0..ow {
            let mut acc = 0.0;
            for i in 0..kernel.rows() {
                for j in 0..kernel.cols() {
                    acc += m.get(y + i, x + j) * kernel.get(i, j);
                }
            }
            out.set(y, x, acc);
        }
    }
    Ok(out)
}

/// Resamples `v` at `n_out` evenly spaced positions by linear
/// interpolation. Both endpoints are reproduced exactly.
pub fn rescale_linear(v: &[f64], n_out: usize) -> Result<Vec<f64>, TransformError> {
    if v.len() < 2 {
        return Err(TransformError::InputTooShort { len: v.len() });
    }
    if n_out < 2 {
        return Err(TransformError::InputTooShort { len: n_out });
    }
    let last = v.len() - 1;
    Ok((0..n_out)
        .map(|j| {
            if j == n_out - 1 {
                return v[last];
            }
            let pos = j as f64 * last as f64 / (n_out - 1) as f64;
            let i = (pos.floor() as usize).min(last - 1);
            let frac = pos - i as f64;
            v[i] + (v[i + 1] - v[i]) * frac
        })
        .collect())
}
