use std::fmt;
use std::str::FromStr;

use super::{Matrix, TransformError};

pub const WINDOW_LEN: usize = 168;
pub const DAYS_PER_WEEK: usize = 7;
pub const HOURS_PER_DAY: usize = 24;

/// The four history representations compared by the benchmark.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ReprKind {
    Naive,
    NaiveDifferences,
    Reshaped,
    ReshapedDifferences,
}

impl ReprKind {
    pub const ALL: [ReprKind; 4] =
        [ReprKind::Naive, ReprKind::NaiveDifferences, ReprKind::Reshaped, ReprKind::ReshapedDifferences];

    pub fn is_differenced(self) -> bool {
        matches!(self, ReprKind::NaiveDifferences | ReprKind::ReshapedDifferences)
    }

    pub fn is_matrix(self) -> bool {
        matches!(self, ReprKind::Reshaped | ReprKind::ReshapedDifferences)
    }

    /// Identifier used in CSV files and on the command line.
    pub fn as_str(self) -> &'static str {
        match self {
            ReprKind::Naive => "naive",
            ReprKind::NaiveDifferences => "naive_differences",
            ReprKind::Reshaped => "reshaped",
            ReprKind::ReshapedDifferences => "reshaped_differences",
        }
    }

    pub fn title(self) -> &'static str {
        match self {
            ReprKind::Naive => "Naive",
            ReprKind::NaiveDifferences => "Naive Differences",
            ReprKind::Reshaped => "Reshaped",
            ReprKind::ReshapedDifferences => "Reshaped Differences",
        }
    }
}

impl fmt::Display for ReprKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ReprKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().replace(['-', ' '], "_").as_str() {
            "naive" => Ok(ReprKind::Naive),
            "naive_differences" | "naive_diff" | "naive_differenced" => Ok(ReprKind::NaiveDifferences),
            "reshaped" => Ok(ReprKind::Reshaped),
            "reshaped_differences" | "reshaped_diff" | "reshaped_differenced" => Ok(ReprKind::ReshapedDifferences),
            other => Err(format!("unknown representation `{other}`")),
        }
    }
}

/// Window length and the day-by-hour grid used for reshaping.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReprLayout {
    pub window: usize,
    pub rows: usize,
    pub cols: usize,
}

impl Default for ReprLayout {
    fn default() -> Self {
        Self { window: WINDOW_LEN, rows: DAYS_PER_WEEK, cols: HOURS_PER_DAY }
    }
}

/// A history window in one of the four representations.
#[derive(Debug, Clone, PartialEq)]
pub struct ReprInput {
    /// Row-major values; flat index 0 is the origin.
    pub data: Vec<f64>,
    pub kind: ReprKind,
    /// `[window]` for vector kinds, `[rows, cols]` for matrix kinds.
    pub shape: Vec<usize>,
    pub origin_index: usize,
    pub horizon: usize,
}

impl ReprInput {
    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn as_matrix(&self) -> Option<Matrix> {
        match self.shape.as_slice() {
            [r, c] => Matrix::new(*r, *c, self.data.clone()).ok(),
            _ => None,
        }
    }
}

/// `[x_k, x_{k-1}, ..., x_{k-len+1}]`.
pub fn window_naive(values: &[f64], k: usize, len: usize) -> Result<Vec<f64>, TransformError> {
    if len == 0 {
        return Err(TransformError::EmptyInput);
    }
    if k + 1 < len || k >= values.len() {
        return Err(TransformError::InsufficientHistory { k, needed: len - 1 });
    }
    Ok((0..len).map(|i| values[k - i]).collect())
}

/// `[x_k - x_{k-h}, ..., x_{k-len+1} - x_{k-len+1-h}]`.
pub fn window_differences(values: &[f64], k: usize, h: usize, len: usize) -> Result<Vec<f64>, TransformError> {
    if len == 0 {
        return Err(TransformError::EmptyInput);
    }
    let needed = len - 1 + h;
    if k < needed || k >= values.len() {
        return Err(TransformError::InsufficientHistory { k, needed });
    }
    Ok((0..len).map(|i| values[k - i] - values[k - i - h]).collect())
}

/// Row-major reshape: `out[r][c] = v[r * cols + c]`.
pub fn reshape(v: &[f64], rows: usize, cols: usize) -> Result<Matrix, TransformError> {
    Matrix::new(rows, cols, v.to_vec())
}

pub fn build_representation(
    values: &[f64],
    k: usize,
    kind: ReprKind,
    h: usize,
) -> Result<ReprInput, TransformError> {
    build_representation_with(values, k, kind, h, ReprLayout::default())
}

pub fn build_representation_with(
    values: &[f64],
    k: usize,
    kind: ReprKind,
    h: usize,
    layout: ReprLayout,
) -> Result<ReprInput, TransformError> {
    let flat = if kind.is_differenced() {
        window_differences(values, k, h, layout.window)?
    } else {
        window_naive(values, k, layout.window)?
    };
    let shape = if kind.is_matrix() {
        let m = reshape(&flat, layout.rows, layout.cols)?;
        vec![m.rows(), m.cols()]
    } else {
        vec![layout.window]
    };
    Ok(ReprInput { data: flat, kind, shape, origin_index: k, horizon: h })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const SERIES: [f64; 6] = [1.0, 2.0, 4.0, 8.0, 16.0, 32.0];

    #[test]
    fn naive_window_small() {
        assert_eq!(window_naive(&SERIES, 5, 3).unwrap(), vec![32.0, 16.0, 8.0]);
        assert_eq!(window_naive(&[7.0; 200], 199, WINDOW_LEN).unwrap(), vec![7.0; WINDOW_LEN]);
    }

    #[test]
    fn naive_window_boundary() {
        let v = vec![0.0; 300];
        assert!(window_naive(&v, 167, WINDOW_LEN).is_ok());
        assert_eq!(
            window_naive(&v, 166, WINDOW_LEN),
            Err(TransformError::InsufficientHistory { k: 166, needed: 167 })
        );
    }

    #[test]
    fn difference_window_small() {
        assert_eq!(window_differences(&SERIES, 5, 1, 3).unwrap(), vec![16.0, 8.0, 4.0]);
        assert_eq!(window_differences(&[3.5; 400], 399, 24, WINDOW_LEN).unwrap(), vec![0.0; WINDOW_LEN]);
        let v = vec![0.0; 300];
        assert!(matches!(
            window_differences(&v, 167, 1, WINDOW_LEN),
            Err(TransformError::InsufficientHistory { .. })
        ));
        assert!(window_differences(&v, 168, 1, WINDOW_LEN).is_ok());
    }

    #[test]
    fn reshape_row_major() {
        let m = reshape(&[1.0, 2.0, 3.0, 4.0, 5.0, 6.0], 2, 3).unwrap();
        assert_eq!(m.to_rows(), vec![vec![1.0, 2.0, 3.0], vec![4.0, 5.0, 6.0]]);
        assert!(matches!(reshape(&[0.0; 5], 2, 3), Err(TransformError::ShapeMismatch { .. })));
    }

    #[test]
    fn reshape_week_corners() {
        let v: Vec<f64> = (0..168).map(|i| i as f64).collect();
        let m = reshape(&v, 7, 24).unwrap();
        assert_eq!(m.get(0, 0), v[0]);
        assert_eq!(m.get(0, 23), v[23]);
        assert_eq!(m.get(6, 0), v[144]);
        assert_eq!(m.get(6, 23), v[167]);
    }

    #[test]
    fn constant_series_representations() {
        let v = vec![7.0; 400];
        let r = build_representation(&v, 399, ReprKind::Reshaped, 1).unwrap();
        assert_eq!(r.shape, vec![7, 24]);
        assert!(r.data.iter().all(|&x| x == 7.0));
        let d = build_representation(&v, 399, ReprKind::ReshapedDifferences, 168).unwrap();
        assert_eq!(d.shape, vec![7, 24]);
        assert!(d.data.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn kind_names_roundtrip() {
        for k in ReprKind::ALL {
            assert_eq!(k.as_str().parse::<ReprKind>().unwrap(), k);
        }
        assert!("image".parse::<ReprKind>().is_err());
    }

    proptest! {
        #[test]
        fn reshaped_flattens_to_naive(values in prop::collection::vec(-100.0f64..100.0, 200..260), h in 1usize..8) {
            let k = values.len() - 1;
            let naive = build_representation(&values, k, ReprKind::Naive, h).unwrap();
            let reshaped = build_representation(&values, k, ReprKind::Reshaped, h).unwrap();
            prop_assert_eq!(&reshaped.as_matrix().unwrap().into_vec(), &naive.data);
            let nd = build_representation(&values, k, ReprKind::NaiveDifferences, h).unwrap();
            let rd = build_representation(&values, k, ReprKind::ReshapedDifferences, h).unwrap();
            prop_assert_eq!(rd.data, nd.data);
        }

        #[test]
        fn differences_are_linear(values in prop::collection::vec(-100.0f64..100.0, 40..60), a in -4.0f64..4.0) {
            let k = values.len() - 1;
            let scaled: Vec<f64> = values.iter().map(|v| a * v).collect();
            let d = window_differences(&values, k, 3, 20).unwrap();
            let ds = window_differences(&scaled, k, 3, 20).unwrap();
            for (x, y) in d.iter().zip(&ds) {
                prop_assert!((a * x - y).abs() <= 1e-9 * (1.0 + y.abs()));
            }
        }

        #[test]
        fn naive_minus_lagged_is_difference(values in prop::collection::vec(-100.0f64..100.0, 40..60), h in 1usize..6) {
            // x_{k-i} - x_{k-i-h}: the lagged window is the naive window at origin k - h.
            let k = values.len() - 1;
            let len = 20;
            let now = window_naive(&values, k, len).unwrap();
            let lagged = window_naive(&values, k - h, len).unwrap();
            let diff = window_differences(&values, k, h, len).unwrap();
            for i in 0..len {
                prop_assert_eq!(now[i] - lagged[i], diff[i]);
            }
        }
    }
}
