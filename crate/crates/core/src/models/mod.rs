//! Forecasting models: the two linear baselines and the FCN / CNN / MLP10
//! networks, with a shared train and predict contract.
//!
//! Every model forecasts absolute demand in GW. Models fed a difference
//! representation regress on `x_{k+h} - x_k` and add `x_k` back at
//! prediction time.

mod checkpoint;
mod linear;
mod nets;
mod train;

use std::fmt;

use crate::numerics::NumericsError;
use crate::transforms::{ReprKind, ReprLayout};

pub use checkpoint::{load_checkpoint, read_checkpoint, save_checkpoint, write_checkpoint, CHECKPOINT_HEADER};
pub use linear::{fit_linear, fit_linear_with, predict_linear, LinearModel, DEFAULT_RIDGE};
pub use nets::{forward, param_shapes, parameter_count, ParamShape};
pub use train::{
    batch_loss, batch_loss_and_grad, build_cnn, build_fcn, build_mlp10, build_model, predict, predict_batch,
    train_model, EpochRecord, ModelParams, Normalization, TrainedModel,
};

#[derive(Debug)]
pub enum ModelError {
    /// The representation cannot be consumed by this model.
    ReprMismatch { model: String, repr: ReprKind },
    EmptyTrainingSet,
    EmptyValidationSet,
    /// Training diverged; `epoch` is 1-based.
    NonFiniteLoss { epoch: usize },
    /// The regularised normal equations were not positive definite.
    SingularSystem,
    InvalidConfig(String),
    Numerics(NumericsError),
    Io { path: String, source: std::io::Error },
    Checkpoint { line: usize, message: String },
}

impl fmt::Display for ModelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelError::ReprMismatch { model, repr } => write!(f, "{model} cannot consume the {repr} representation"),
            ModelError::EmptyTrainingSet => write!(f, "training set is empty"),
            ModelError::EmptyValidationSet => write!(f, "validation set is empty"),
            ModelError::NonFiniteLoss { epoch } => write!(f, "loss became non-finite in epoch {epoch}"),
            ModelError::SingularSystem => write!(f, "normal equations are singular"),
            ModelError::InvalidConfig(m) => write!(f, "invalid model configuration: {m}"),
            ModelError::Numerics(e) => write!(f, "{e}"),
            ModelError::Io { path, source } => write!(f, "{path}: {source}"),
            ModelError::Checkpoint { line, message } => write!(f, "checkpoint line {line}: {message}"),
        }
    }
}

impl std::error::Error for ModelError {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            ModelError::Numerics(e) => Some(e),
            ModelError::Io { source, .. } => Some(source),
            _ => None,
        }
    }
}

impl From<NumericsError> for ModelError {
    fn from(e: NumericsError) -> Self {
        ModelError::Numerics(e)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    Linear,
    Fcn,
    Cnn,
    Mlp10,
}

impl Family {
    pub fn as_str(self) -> &'static str {
        match self {
            Family::Linear => "linear",
            Family::Fcn => "fcn",
            Family::Cnn => "cnn",
            Family::Mlp10 => "mlp10",
        }
    }

    pub fn accepts(self, repr: ReprKind) -> bool {
        match self {
            Family::Cnn => repr.is_matrix(),
            Family::Linear | Family::Fcn | Family::Mlp10 => !repr.is_matrix(),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Family {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "linear" => Ok(Family::Linear),
            "fcn" => Ok(Family::Fcn),
            "cnn" => Ok(Family::Cnn),
            "mlp10" | "mlp" => Ok(Family::Mlp10),
            other => Err(format!("unknown model family `{other}`")),
        }
    }
}

/// Layer widths. The defaults give the 64-dimensional FCN latent, two
/// stacked 3×3 convolutions and the three-layer CNN head.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Architecture {
    /// FCN part 1 widths, history → latent.
    pub fcn_encoder: Vec<usize>,
    /// FCN part 2 hidden widths after the calendar is appended.
    pub fcn_head: Vec<usize>,
    pub cnn_filters: Vec<usize>,
    /// Square kernel side.
    pub cnn_kernel: usize,
    pub cnn_head: Vec<usize>,
    pub mlp_hidden: usize,
}

impl Default for Architecture {
    fn default() -> Self {
        Self {
            fcn_encoder: vec![128, 64],
            fcn_head: vec![32],
            cnn_filters: vec![16, 32],
            cnn_kernel: 3,
            cnn_head: vec![128, 64, 32],
            mlp_hidden: 10,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainingConfig {
    pub lr: f64,
    pub batch_size: usize,
    pub max_epochs: usize,
    pub patience: usize,
}

impl Default for TrainingConfig {
    fn default() -> Self {
        Self { lr: 1e-3, batch_size: 64, max_epochs: 200, patience: 10 }
    }
}

impl TrainingConfig {
    pub fn validate(&self) -> Result<(), ModelError> {
        if !(self.lr > 0.0 && self.lr.is_finite()) {
            return Err(ModelError::InvalidConfig(format!("learning rate {} must be positive", self.lr)));
        }
        if self.batch_size == 0 || self.max_epochs == 0 || self.patience == 0 {
            return Err(ModelError::InvalidConfig("batch size, epochs and patience must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelSpec {
    pub family: Family,
    pub repr: ReprKind,
    pub horizon: usize,
    pub layout: ReprLayout,
    pub arch: Architecture,
    pub training: TrainingConfig,
}

impl ModelSpec {
    pub fn new(family: Family, repr: ReprKind, horizon: usize) -> Self {
        Self {
            family,
            repr,
            horizon,
            layout: ReprLayout::default(),
            arch: Architecture::default(),
            training: TrainingConfig::default(),
        }
    }

    /// The network family the benchmark pairs with `repr`.
    pub fn default_family(repr: ReprKind) -> Family {
        if repr.is_matrix() {
            Family::Cnn
        } else {
            Family::Fcn
        }
    }

    pub fn check_compatible(&self) -> Result<(), ModelError> {
        if !self.family.accepts(self.repr) {
            return Err(ModelError::ReprMismatch { model: self.family.to_string(), repr: self.repr });
        }
        Ok(())
    }

    /// Compatibility plus the size constraints of the chosen family.
    pub fn validate(&self) -> Result<(), ModelError> {
        self.check_compatible()?;
        self.training.validate()?;
        let l = self.layout;
        if l.window == 0 || l.rows * l.cols != l.window {
            return Err(ModelError::InvalidConfig(format!(
                "layout {}x{} does not tile a window of {}",
                l.rows, l.cols, l.window
            )));
        }
        if self.horizon == 0 {
            return Err(ModelError::InvalidConfig("horizon must be positive".into()));
        }
        let a = &self.arch;
        let widths_ok = |w: &[usize]| w.iter().all(|&x| x > 0);
        match self.family {
            Family::Fcn if !widths_ok(&a.fcn_encoder) || !widths_ok(&a.fcn_head) => {
                return Err(ModelError::InvalidConfig("FCN widths must be positive".into()));
            }
            Family::Mlp10 if a.mlp_hidden == 0 => {
                return Err(ModelError::InvalidConfig("MLP hidden width must be positive".into()));
            }
            Family::Cnn => {
                if a.cnn_filters.is_empty() || !widths_ok(&a.cnn_filters) || !widths_ok(&a.cnn_head) || a.cnn_kernel == 0 {
                    return Err(ModelError::InvalidConfig("CNN filters, kernel and widths must be positive".into()));
                }
                let shrink = (a.cnn_kernel - 1) * a.cnn_filters.len();
                if shrink >= l.rows || shrink >= l.cols {
                    return Err(ModelError::InvalidConfig(format!(
                        "{} convolutions of {}x{} do not fit a {}x{} input",
                        a.cnn_filters.len(),
                        a.cnn_kernel,
                        a.cnn_kernel,
                        l.rows,
                        l.cols
                    )));
                }
            }
            _ => {}
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compatibility_matrix() {
        for repr in ReprKind::ALL {
            for fam in [Family::Linear, Family::Fcn, Family::Mlp10] {
                assert_eq!(ModelSpec::new(fam, repr, 1).check_compatible().is_ok(), !repr.is_matrix());
            }
            assert_eq!(ModelSpec::new(Family::Cnn, repr, 1).check_compatible().is_ok(), repr.is_matrix());
        }
    }

    #[test]
    fn cnn_kernel_must_fit() {
        let mut s = ModelSpec::new(Family::Cnn, ReprKind::Reshaped, 1);
        assert!(s.validate().is_ok());
        s.arch.cnn_filters = vec![4, 4, 4, 4];
        assert!(s.validate().is_err());
    }

    #[test]
    fn family_parsing() {
        assert_eq!("FCN".parse::<Family>().unwrap(), Family::Fcn);
        assert_eq!("mlp10".parse::<Family>().unwrap(), Family::Mlp10);
        assert!("rnn".parse::<Family>().is_err());
    }
}
