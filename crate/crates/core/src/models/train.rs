use rand::seq::SliceRandom;

use crate::calendar::CALENDAR_DIM;
use crate::experiment::{mae, Sample};
use crate::numerics::{he_uniform, seeded_rng, AdamConfig, AdamState, Graph, Parameter, Rng, Tensor, Var};

use super::linear::{fit_linear, predict_linear, LinearModel};
use super::nets::{forward, param_shapes};
use super::{Family, ModelError, ModelSpec};

const EVAL_BATCH: usize = 256;

/// Per-component standardisation fitted on the training split.
#[derive(Debug, Clone, PartialEq)]
pub struct Normalization {
    pub input_mean: Vec<f64>,
    pub input_std: Vec<f64>,
    pub calendar_mean: Vec<f64>,
    pub calendar_std: Vec<f64>,
    pub target_mean: f64,
    pub target_std: f64,
}

fn mean_std_or_unit(values: impl Iterator<Item = f64> + Clone, n: usize) -> (f64, f64) {
    let mean = values.clone().sum::<f64>() / n as f64;
    let var = values.map(|v| (v - mean) * (v - mean)).sum::<f64>() / n as f64;
    let std = var.sqrt();
    // Constant components (up to rounding in the mean) keep unit scale.
    if std > 1e-12 * mean.abs().max(1.0) {
        (mean, std)
    } else {
        (mean, 1.0)
    }
}

impl Normalization {
    pub fn identity(window: usize) -> Self {
        Self {
            input_mean: vec![0.0; window],
            input_std: vec![1.0; window],
            calendar_mean: vec![0.0; CALENDAR_DIM],
            calendar_std: vec![1.0; CALENDAR_DIM],
            target_mean: 0.0,
            target_std: 1.0,
        }
    }

    /// Statistics of inputs, calendar and regression targets over `samples`.
    pub fn fit(samples: &[Sample]) -> Result<Self, ModelError> {
        let n = samples.len();
        let first = samples.first().ok_or(ModelError::EmptyTrainingSet)?;
        let window = first.repr.len();
        let (input_mean, input_std) = (0..window)
            .map(|i| mean_std_or_unit(samples.iter().map(move |s| s.repr.data[i]), n))
            .unzip();
        let cals: Vec<[f64; CALENDAR_DIM]> = samples.iter().map(|s| s.calendar.to_array()).collect();
        let (calendar_mean, calendar_std) =
            (0..CALENDAR_DIM).map(|j| mean_std_or_unit(cals.iter().map(move |c| c[j]), n)).unzip();
        let (target_mean, target_std) = mean_std_or_unit(samples.iter().map(Sample::training_target), n);
        Ok(Self { input_mean, input_std, calendar_mean, calendar_std, target_mean, target_std })
    }

    pub fn standardize_input(&self, x: &[f64], out: &mut Vec<f64>) {
        out.extend(x.iter().zip(&self.input_mean).zip(&self.input_std).map(|((v, m), s)| (v - m) / s));
    }

    pub fn standardize_calendar(&self, c: &[f64], out: &mut Vec<f64>) {
        out.extend(c.iter().zip(&self.calendar_mean).zip(&self.calendar_std).map(|((v, m), s)| (v - m) / s));
    }

    pub fn standardize_target(&self, y: f64) -> f64 {
        (y - self.target_mean) / self.target_std
    }

    pub fn destandardize_target(&self, z: f64) -> f64 {
        z * self.target_std + self.target_mean
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ModelParams {
    /// Tensors in the order of [`param_shapes`](super::param_shapes).
    Network(Vec<Parameter>),
    Linear(LinearModel),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpochRecord {
    pub epoch: usize,
    /// Mean standardised L1 loss over the epoch's batches.
    pub train_loss: f64,
    pub val_mae: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainedModel {
    pub spec: ModelSpec,
    pub params: ModelParams,
    pub normalization: Normalization,
    pub seed: Option<u64>,
    pub best_val_mae: Option<f64>,
    pub history: Vec<EpochRecord>,
}

impl TrainedModel {
    fn untrained(spec: ModelSpec, params: ModelParams) -> Self {
        let window = spec.layout.window;
        Self { spec, params, normalization: Normalization::identity(window), seed: None, best_val_mae: None, history: Vec::new() }
    }

    /// Same architecture with every weight and bias set to zero.
    pub fn zeroed(spec: ModelSpec) -> Result<Self, ModelError> {
        spec.validate()?;
        let params = match spec.family {
            Family::Linear => ModelParams::Linear(LinearModel {
                intercept: 0.0,
                history_weights: vec![0.0; spec.layout.window],
                calendar_weights: vec![0.0; CALENDAR_DIM],
                differenced: spec.repr.is_differenced(),
                horizon: spec.horizon,
            }),
            _ => ModelParams::Network(
                param_shapes(&spec)?
                    .into_iter()
                    .map(|p| Parameter::new(p.name, Tensor::zeros(&p.shape)))
                    .collect(),
            ),
        };
        Ok(Self::untrained(spec, params))
    }

    pub fn network_params(&self) -> Option<&[Parameter]> {
        match &self.params {
            ModelParams::Network(p) => Some(p),
            ModelParams::Linear(_) => None,
        }
    }

    pub fn network_params_mut(&mut self) -> Option<&mut Vec<Parameter>> {
        match &mut self.params {
            ModelParams::Network(p) => Some(p),
            ModelParams::Linear(_) => None,
        }
    }

    pub fn parameter_count(&self) -> usize {
        match &self.params {
            ModelParams::Network(p) => p.iter().map(|p| p.value.len()).sum(),
            ModelParams::Linear(m) => 1 + m.history_weights.len() + m.calendar_weights.len(),
        }
    }

    fn check_sample(&self, s: &Sample) -> Result<(), ModelError> {
        if s.repr.kind != self.spec.repr || s.repr.len() != self.spec.layout.window {
            return Err(ModelError::ReprMismatch {
                model: format!("{} model for {}", self.spec.family, self.spec.repr),
                repr: s.repr.kind,
            });
        }
        Ok(())
    }
}

fn build_network(spec: ModelSpec, family: Family, rng: &mut Rng) -> Result<TrainedModel, ModelError> {
    if spec.family != family {
        return Err(ModelError::InvalidConfig(format!("expected a {family} spec, got {}", spec.family)));
    }
    let params = param_shapes(&spec)?
        .into_iter()
        .map(|p| {
            let len = p.shape.iter().product();
            let data = if p.shape.len() == 1 { vec![0.0; len] } else { he_uniform(rng, p.fan_in, len) };
            Parameter::new(p.name, Tensor::new(p.shape, data).expect("shape and length agree"))
        })
        .collect();
    Ok(TrainedModel::untrained(spec, ModelParams::Network(params)))
}

/// Fully connected network for vector representations: history → latent,
/// then latent ⊕ calendar → hidden → 1.
pub fn build_fcn(spec: ModelSpec, rng: &mut Rng) -> Result<TrainedModel, ModelError> {
    build_network(spec, Family::Fcn, rng)
}

/// Two valid 3×3 convolutions on the day-by-hour matrix, then
/// flatten ⊕ calendar → three hidden layers → 1.
pub fn build_cnn(spec: ModelSpec, rng: &mut Rng) -> Result<TrainedModel, ModelError> {
    build_network(spec, Family::Cnn, rng)
}

/// History ⊕ calendar → 10 ReLU units → 1.
pub fn build_mlp10(spec: ModelSpec, rng: &mut Rng) -> Result<TrainedModel, ModelError> {
    build_network(spec, Family::Mlp10, rng)
}

/// Dispatches on `spec.family`; linear models start at zero.
pub fn build_model(spec: ModelSpec, rng: &mut Rng) -> Result<TrainedModel, ModelError> {
    match spec.family {
        Family::Linear => TrainedModel::zeroed(spec),
        f => build_network(spec, f, rng),
    }
}

/// Standardised input tensors for a batch.
fn batch_inputs(spec: &ModelSpec, norm: &Normalization, batch: &[&Sample]) -> (Tensor, Tensor) {
    let l = spec.layout;
    let mut x = Vec::with_capacity(batch.len() * l.window);
    let mut c = Vec::with_capacity(batch.len() * CALENDAR_DIM);
    for s in batch {
        norm.standardize_input(&s.repr.data, &mut x);
        norm.standardize_calendar(&s.calendar.to_array(), &mut c);
    }
    let shape = if spec.family == Family::Cnn { vec![batch.len(), 1, l.rows, l.cols] } else { vec![batch.len(), l.window] };
    (Tensor::new(shape, x).expect("batch shape"), Tensor::new(vec![batch.len(), CALENDAR_DIM], c).expect("batch shape"))
}

fn record(
    spec: &ModelSpec,
    norm: &Normalization,
    params: &[Parameter],
    batch: &[&Sample],
    trainable: bool,
) -> Result<(Graph, Vec<Var>, Var), ModelError> {
    let mut g = Graph::new();
    let vars: Vec<Var> = params
        .iter()
        .map(|p| if trainable { g.param(p.value.clone()) } else { g.constant(p.value.clone()) })
        .collect();
    let (x, c) = batch_inputs(spec, norm, batch);
    let x = g.constant(x);
    let c = g.constant(c);
    let out = forward(spec, &mut g, &vars, x, c)?;
    Ok((g, vars, out))
}

fn network_predict(
    spec: &ModelSpec,
    norm: &Normalization,
    params: &[Parameter],
    samples: &[Sample],
) -> Result<Vec<f64>, ModelError> {
    let mut out = Vec::with_capacity(samples.len());
    for chunk in samples.chunks(EVAL_BATCH) {
        let refs: Vec<&Sample> = chunk.iter().collect();
        let (g, _, y) = record(spec, norm, params, &refs, false)?;
        for (s, z) in chunk.iter().zip(g.value(y).data()) {
            let v = norm.destandardize_target(*z);
            out.push(if spec.repr.is_differenced() { s.x_k + v } else { v });
        }
    }
    Ok(out)
}

/// Forecast of `x_{k+h}` in GW.
pub fn predict(model: &TrainedModel, s: &Sample) -> Result<f64, ModelError> {
    Ok(predict_batch(model, std::slice::from_ref(s))?[0])
}

/// Forecasts for every sample, in order.
pub fn predict_batch(model: &TrainedModel, samples: &[Sample]) -> Result<Vec<f64>, ModelError> {
    for s in samples {
        model.check_sample(s)?;
    }
    match &model.params {
        ModelParams::Linear(m) => samples.iter().map(|s| predict_linear(m, s)).collect(),
        ModelParams::Network(p) => network_predict(&model.spec, &model.normalization, p, samples),
    }
}

fn targets(norm: &Normalization, batch: &[&Sample]) -> Vec<f64> {
    batch.iter().map(|s| norm.standardize_target(s.training_target())).collect()
}

/// Standardised L1 training loss of a network on `samples`.
pub fn batch_loss(model: &TrainedModel, samples: &[Sample]) -> Result<f64, ModelError> {
    Ok(batch_loss_and_grad(model, samples, false)?.0)
}

/// Loss and, when `with_grad`, its gradient for every parameter tensor.
pub fn batch_loss_and_grad(
    model: &TrainedModel,
    samples: &[Sample],
    with_grad: bool,
) -> Result<(f64, Vec<Vec<f64>>), ModelError> {
    let params = model
        .network_params()
        .ok_or_else(|| ModelError::InvalidConfig("the linear model has no training loss".into()))?;
    if samples.is_empty() {
        return Err(ModelError::EmptyTrainingSet);
    }
    for s in samples {
        model.check_sample(s)?;
    }
    let refs: Vec<&Sample> = samples.iter().collect();
    let (mut g, vars, out) = record(&model.spec, &model.normalization, params, &refs, with_grad)?;
    let loss = g.l1_loss(out, &targets(&model.normalization, &refs))?;
    let value = g.value(loss).item();
    if !with_grad {
        return Ok((value, Vec::new()));
    }
    g.backward(loss)?;
    let grads = vars
        .iter()
        .zip(params)
        .map(|(v, p)| g.grad_data(*v).map(<[f64]>::to_vec).unwrap_or_else(|| vec![0.0; p.value.len()]))
        .collect();
    Ok((value, grads))
}

/// Mini-batch Adam on the L1 loss of standardised targets with early
/// stopping on validation MAE in GW. Returns the best-epoch parameters.
///
/// Linear models are fitted in closed form on `train`.
pub fn train_model(
    mut model: TrainedModel,
    train: &[Sample],
    val: &[Sample],
    seed: u64,
) -> Result<TrainedModel, ModelError> {
    if train.is_empty() {
        return Err(ModelError::EmptyTrainingSet);
    }
    if val.is_empty() {
        return Err(ModelError::EmptyValidationSet);
    }
    model.spec.validate()?;
    for s in train.iter().chain(val) {
        model.check_sample(s)?;
    }
    let y_val: Vec<f64> = val.iter().map(|s| s.target_absolute()).collect();
    model.seed = Some(seed);

    let mut params = match std::mem::replace(&mut model.params, ModelParams::Network(Vec::new())) {
        ModelParams::Linear(_) => {
            let lm = fit_linear(train, model.spec.repr.is_differenced())?;
            model.params = ModelParams::Linear(lm);
            let pred = predict_batch(&model, val)?;
            model.best_val_mae = Some(mae(&y_val, &pred).expect("non-empty, equal lengths"));
            return Ok(model);
        }
        ModelParams::Network(p) => p,
    };

    let spec = model.spec.clone();
    let tc = spec.training;
    let norm = Normalization::fit(train)?;
    let mut rng = seeded_rng(seed);
    rng.long_jump();
    let mut adam = AdamState::new(AdamConfig { lr: tc.lr, ..AdamConfig::default() }, &params);
    let mut order: Vec<usize> = (0..train.len()).collect();
    let mut best: Option<(f64, Vec<Parameter>)> = None;
    let mut stale = 0;
    let mut history = Vec::new();

    for epoch in 1..=tc.max_epochs {
        order.shuffle(&mut rng);
        let mut loss_sum = 0.0;
        for chunk in order.chunks(tc.batch_size) {
            let batch: Vec<&Sample> = chunk.iter().map(|&i| &train[i]).collect();
            let (mut g, vars, out) = record(&spec, &norm, &params, &batch, true)?;
            let loss = g.l1_loss(out, &targets(&norm, &batch))?;
            let lv = g.value(loss).item();
            if !lv.is_finite() {
                return Err(ModelError::NonFiniteLoss { epoch });
            }
            g.backward(loss)?;
            for (p, v) in params.iter_mut().zip(&vars) {
                match g.grad_data(*v) {
                    Some(d) => p.accumulate_grad(d),
                    None => p.accumulate_grad(&vec![0.0; p.value.len()]),
                }
            }
            adam.step(&mut params)?;
            loss_sum += lv * batch.len() as f64;
        }
        let pred = network_predict(&spec, &norm, &params, val)?;
        let val_mae = mae(&y_val, &pred).expect("non-empty, equal lengths");
        if !val_mae.is_finite() {
            return Err(ModelError::NonFiniteLoss { epoch });
        }
        history.push(EpochRecord { epoch, train_loss: loss_sum / train.len() as f64, val_mae });
        if best.as_ref().map_or(true, |(b, _)| val_mae < *b) {
            best = Some((val_mae, params.clone()));
            stale = 0;
        } else {
            stale += 1;
            if stale >= tc.patience {
                break;
            }
        }
    }

    let (best_mae, best_params) = best.expect("at least one epoch");
    model.params = ModelParams::Network(best_params);
    model.normalization = norm;
    model.best_val_mae = Some(best_mae);
    model.history = history;
    Ok(model)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calendar::CalendarEncoder;
    use crate::experiment::build_sample;
    use crate::ingest::TimeSeries;
    use crate::transforms::{ReprKind, ReprLayout};
    use chrono::{TimeZone, Utc};
    use proptest::prelude::*;

    fn samples(values: &[f64], kind: ReprKind, h: usize) -> Vec<Sample> {
        let start = Utc.with_ymd_and_hms(2019, 1, 1, 0, 0, 0).unwrap();
        let ts = TimeSeries::hourly("t", start, values.to_vec());
        let enc = CalendarEncoder::default();
        let layout = ReprLayout::default();
        let first = layout.window - 1 + if kind.is_differenced() { h } else { 0 };
        (first..ts.len() - h).map(|k| build_sample(&ts, k, kind, h, layout, &enc).unwrap()).collect()
    }

    fn wave(n: usize) -> Vec<f64> {
        (0..n).map(|i| 55.0 + 8.0 * (i as f64 * std::f64::consts::TAU / 24.0).sin()).collect()
    }

    #[test]
    fn zero_network_predicts_target_mean() {
        let s = samples(&wave(300), ReprKind::Naive, 1);
        let mut m = TrainedModel::zeroed(ModelSpec::new(Family::Fcn, ReprKind::Naive, 1)).unwrap();
        m.normalization.target_mean = 47.5;
        m.normalization.target_std = 3.0;
        assert_eq!(predict(&m, &s[0]).unwrap(), 47.5);

        let d = samples(&wave(300), ReprKind::NaiveDifferences, 1);
        let m = TrainedModel::zeroed(ModelSpec::new(Family::Fcn, ReprKind::NaiveDifferences, 1)).unwrap();
        assert_eq!(predict(&m, &d[3]).unwrap(), d[3].x_k);
    }

    #[test]
    fn batch_matches_single() {
        let s = samples(&wave(320), ReprKind::Reshaped, 24);
        let spec = ModelSpec::new(Family::Cnn, ReprKind::Reshaped, 24);
        let m = build_cnn(spec, &mut seeded_rng(4)).unwrap();
        let batch = predict_batch(&m, &s).unwrap();
        for (x, b) in s.iter().zip(&batch) {
            let single = predict(&m, x).unwrap();
            assert!((single - b).abs() <= 1e-12 * b.abs(), "{single} vs {b}");
        }
    }

    #[test]
    fn compatibility_enforced() {
        let v = samples(&wave(300), ReprKind::Naive, 1);
        let r = samples(&wave(300), ReprKind::Reshaped, 1);
        let fcn = build_fcn(ModelSpec::new(Family::Fcn, ReprKind::Naive, 1), &mut seeded_rng(1)).unwrap();
        assert!(matches!(predict(&fcn, &r[0]), Err(ModelError::ReprMismatch { .. })));
        assert!(matches!(
            build_cnn(ModelSpec::new(Family::Cnn, ReprKind::Naive, 1), &mut seeded_rng(1)),
            Err(ModelError::ReprMismatch { .. })
        ));
        assert!(matches!(
            build_fcn(ModelSpec::new(Family::Fcn, ReprKind::Reshaped, 1), &mut seeded_rng(1)),
            Err(ModelError::ReprMismatch { .. })
        ));
        let cnn = build_cnn(ModelSpec::new(Family::Cnn, ReprKind::Reshaped, 1), &mut seeded_rng(1)).unwrap();
        assert!(matches!(predict(&cnn, &v[0]), Err(ModelError::ReprMismatch { .. })));
    }

    #[test]
    fn he_init_and_zero_biases() {
        let m = build_mlp10(ModelSpec::new(Family::Mlp10, ReprKind::Naive, 1), &mut seeded_rng(9)).unwrap();
        let p = m.network_params().unwrap();
        let bound = (6.0f64 / 176.0).sqrt();
        assert!(p[0].value.data().iter().all(|w| w.abs() <= bound));
        assert!(p[0].value.data().iter().any(|w| *w != 0.0));
        assert!(p[1].value.data().iter().all(|b| *b == 0.0));
        assert_eq!(m.parameter_count(), 1781);
    }

    #[test]
    fn empty_sets_rejected() {
        let s = samples(&wave(300), ReprKind::Naive, 1);
        let m = build_mlp10(ModelSpec::new(Family::Mlp10, ReprKind::Naive, 1), &mut seeded_rng(1)).unwrap();
        assert!(matches!(train_model(m.clone(), &[], &s, 1), Err(ModelError::EmptyTrainingSet)));
        assert!(matches!(train_model(m, &s, &[], 1), Err(ModelError::EmptyValidationSet)));
    }

    #[test]
    fn linear_family_trains_in_closed_form() {
        let s = samples(&wave(400), ReprKind::NaiveDifferences, 24);
        let (tr, va) = s.split_at(150);
        let m = build_model(ModelSpec::new(Family::Linear, ReprKind::NaiveDifferences, 24), &mut seeded_rng(0)).unwrap();
        let m = train_model(m, tr, va, 0).unwrap();
        assert!(m.best_val_mae.unwrap() < 1e-6);
    }

    #[test]
    fn diverging_training_reports_epoch() {
        let s = samples(&wave(260), ReprKind::Naive, 1);
        let mut spec = ModelSpec::new(Family::Mlp10, ReprKind::Naive, 1);
        spec.training.lr = 1e300;
        spec.training.max_epochs = 3;
        let m = build_mlp10(spec, &mut seeded_rng(1)).unwrap();
        match train_model(m, &s[..60], &s[60..], 1) {
            Err(ModelError::NonFiniteLoss { epoch }) => assert!(epoch >= 1),
            other => panic!("expected divergence, got {other:?}"),
        }
    }

    proptest! {
        #[test]
        fn standardize_round_trip(mean in -100.0f64..100.0, std in 0.01f64..50.0, y in -200.0f64..200.0) {
            let mut n = Normalization::identity(4);
            n.target_mean = mean;
            n.target_std = std;
            let back = n.destandardize_target(n.standardize_target(y));
            prop_assert!((back - y).abs() <= 1e-12 * y.abs().max(1.0));
        }

        #[test]
        fn fitted_std_positive(vals in prop::collection::vec(40.0f64..70.0, 200..260)) {
            let s = samples(&vals, ReprKind::Naive, 1);
            let n = Normalization::fit(&s).unwrap();
            prop_assert!(n.input_std.iter().chain(&n.calendar_std).all(|s| *s > 0.0));
            prop_assert!(n.target_std > 0.0);
        }
    }
}
