//! Dense `f64` tensors, a reverse-mode tape and the Adam optimiser.
//!
//! A [`Graph`] records every operation applied to its [`Var`]s; calling
//! [`Graph::backward`] on a scalar walks the tape in reverse and fills the
//! gradient of every node that requires one.

mod adam;
pub(crate) mod gemm;
mod graph;
mod rng;
mod tensor;

use std::fmt;

pub use adam::{adam_step, AdamConfig, AdamState, Parameter};
pub use graph::{Graph, Var};
pub use rng::{he_uniform, seeded_rng, Rng};
pub use tensor::Tensor;

#[derive(Debug, Clone, PartialEq)]
pub enum NumericsError {
    ShapeMismatch { op: &'static str, detail: String },
    KernelTooLarge { kernel: Vec<usize>, input: Vec<usize> },
    NotScalarLoss { shape: Vec<usize> },
    MissingGradient { index: usize },
}

impl NumericsError {
    pub(crate) fn shape(op: &'static str, detail: impl Into<String>) -> Self {
        NumericsError::ShapeMismatch { op, detail: detail.into() }
    }
}

impl fmt::Display for NumericsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NumericsError::ShapeMismatch { op, detail } => write!(f, "{op}: shape mismatch ({detail})"),
            NumericsError::KernelTooLarge { kernel, input } => {
                write!(f, "kernel {kernel:?} does not fit input {input:?}")
            }
            NumericsError::NotScalarLoss { shape } => write!(f, "loss must be a scalar, got shape {shape:?}"),
            NumericsError::MissingGradient { index } => write!(f, "parameter {index} has no gradient"),
        }
    }
}

impl std::error::Error for NumericsError {}
