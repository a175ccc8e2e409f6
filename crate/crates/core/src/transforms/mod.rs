//! Transformations between data representations.
//!
//! Vectors are plain `&[f64]`; two-dimensional data uses the row-major
//! [`Matrix`]. History windows are ordered newest first: element 0 is the
//! value at the forecast origin.

mod catalog;
mod kmeans;
mod pca;
mod window;

use std::fmt;

pub use catalog::{aggregate, convolve1d, convolve2d, rescale_linear, select, select_matrix, AggFn, Axis};
pub use kmeans::{kmeans, kmeans_with, within_cluster_cost, KMeansConfig, KMeansResult};
pub use pca::{pca, symmetric_eigen, PcaResult};
pub use window::{
    build_representation, build_representation_with, reshape, window_differences, window_naive, ReprInput,
    ReprKind, ReprLayout, DAYS_PER_WEEK, HOURS_PER_DAY, WINDOW_LEN,
};

#[derive(Debug, Clone, PartialEq)]
pub enum TransformError {
    /// Origin `k` lacks `needed` hours of history before it.
    InsufficientHistory { k: usize, needed: usize },
    ShapeMismatch { expected: usize, got: usize },
    IndexOutOfBounds { index: usize, len: usize },
    EmptyInput,
    KernelTooLarge,
    InputTooShort { len: usize },
    InvalidK { k: usize, n: usize },
    InvalidComponents { requested: usize, max: usize },
}

impl fmt::Display for TransformError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TransformError::InsufficientHistory { k, needed } => {
                write!(f, "origin index {k} has less than {needed} hours of history")
            }
            TransformError::ShapeMismatch { expected, got } => {
                write!(f, "shape mismatch: expected {expected} elements, got {got}")
            }
            TransformError::IndexOutOfBounds { index, len } => {
                write!(f, "index {index} out of bounds for length {len}")
            }
            TransformError::EmptyInput => write!(f, "empty input"),
            TransformError::KernelTooLarge => write!(f, "kernel larger than input"),
            TransformError::InputTooShort { len } => write!(f, "input of length {len} is too short"),
            TransformError::InvalidK { k, n } => write!(f, "k = {k} is invalid for {n} points"),
            TransformError::InvalidComponents { requested, max } => {
                write!(f, "{requested} components requested, at most {max} available")
            }
        }
    }
}

impl std::error::Error for TransformError {}

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self, TransformError> {
        if rows * cols != data.len() {
            return Err(TransformError::ShapeMismatch { expected: rows * cols, got: data.len() });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![0.0; rows * cols] }
    }

    /// Panics on ragged input.
    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        Self { rows: rows.len(), cols, data: rows.concat() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn transpose(&self) -> Matrix {
        let mut out = Matrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.set(c, r, self.get(r, c));
            }
        }
        out
    }
}
