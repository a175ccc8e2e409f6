use crate::calendar::CALENDAR_DIM;
use crate::numerics::{Graph, NumericsError, Var};

use super::{Family, ModelError, ModelSpec};

/// Name, shape and fan-in of one parameter tensor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParamShape {
    pub name: String,
    pub shape: Vec<usize>,
    pub fan_in: usize,
}

fn dense_pair(out: &mut Vec<ParamShape>, prefix: &str, n_in: usize, n_out: usize) {
    out.push(ParamShape { name: format!("{prefix}.w"), shape: vec![n_out, n_in], fan_in: n_in });
    out.push(ParamShape { name: format!("{prefix}.b"), shape: vec![n_out], fan_in: n_in });
}

/// Parameter tensors of a network family in forward order.
pub fn param_shapes(spec: &ModelSpec) -> Result<Vec<ParamShape>, ModelError> {
    spec.validate()?;
    let a = &spec.arch;
    let l = spec.layout;
    let mut out = Vec::new();
    match spec.family {
        Family::Linear => {
            return Err(ModelError::InvalidConfig("the linear model has no network parameters".into()));
        }
        Family::Fcn => {
            let mut prev = l.window;
            for (i, &w) in a.fcn_encoder.iter().enumerate() {
                dense_pair(&mut out, &format!("enc{i}"), prev, w);
                prev = w;
            }
            prev += CALENDAR_DIM;
            for (i, &w) in a.fcn_head.iter().enumerate() {
                dense_pair(&mut out, &format!("head{i}"), prev, w);
                prev = w;
            }
            dense_pair(&mut out, "out", prev, 1);
        }
        Family::Cnn => {
            let (mut c, mut h, mut w) = (1, l.rows, l.cols);
            let k = a.cnn_kernel;
            for (i, &f) in a.cnn_filters.iter().enumerate() {
                out.push(ParamShape { name: format!("conv{i}.k"), shape: vec![f, c, k, k], fan_in: c * k * k });
                out.push(ParamShape { name: format!("conv{i}.b"), shape: vec![f], fan_in: c * k * k });
                c = f;
                h -= k - 1;
                w -= k - 1;
            }
            let mut prev = c * h * w + CALENDAR_DIM;
            for (i, &width) in a.cnn_head.iter().enumerate() {
                dense_pair(&mut out, &format!("head{i}"), prev, width);
                prev = width;
            }
            dense_pair(&mut out, "out", prev, 1);
        }
        Family::Mlp10 => {
            dense_pair(&mut out, "hidden", l.window + CALENDAR_DIM, a.mlp_hidden);
            dense_pair(&mut out, "out", a.mlp_hidden, 1);
        }
    }
    Ok(out)
}

pub fn parameter_count(spec: &ModelSpec) -> Result<usize, ModelError> {
    Ok(param_shapes(spec)?.iter().map(|p| p.shape.iter().product::<usize>()).sum())
}

/// Records the network on `g`. `x` is `[B, window]` (vector families) or
/// `[B, 1, rows, cols]` (CNN), `cal` is `[B, 8]`; returns `[B, 1]`.
/// `params` must follow [`param_shapes`] order.
pub fn forward(spec: &ModelSpec, g: &mut Graph, params: &[Var], x: Var, cal: Var) -> Result<Var, NumericsError> {
    let mut ps = params.iter().copied();
    let a = &spec.arch;
    let out = match spec.family {
        Family::Linear => return Err(NumericsError::shape("forward", "linear model has no graph")),
        Family::Fcn => {
            let mut h = x;
            for _ in &a.fcn_encoder {
                h = dense_relu(g, h, &mut ps)?;
            }
            h = g.concat(&[h, cal], 1)?;
            for _ in &a.fcn_head {
                h = dense_relu(g, h, &mut ps)?;
            }
            h
        }
        Family::Cnn => {
            let mut h = x;
            for _ in &a.cnn_filters {
                let (k, b) = pair(&mut ps);
                let z = g.conv2d(h, k, b)?;
                h = g.relu(z);
            }
            h = g.flatten_batch(h);
            h = g.concat(&[h, cal], 1)?;
            for _ in &a.cnn_head {
                h = dense_relu(g, h, &mut ps)?;
            }
            h
        }
        Family::Mlp10 => {
            let h = g.concat(&[x, cal], 1)?;
            dense_relu(g, h, &mut ps)?
        }
    };
    let (w, b) = pair(&mut ps);
    g.dense(out, w, b)
}

fn pair(ps: &mut impl Iterator<Item = Var>) -> (Var, Var) {
    let mut next = || ps.next().expect("parameter list shorter than the architecture");
    (next(), next())
}

fn dense_relu(g: &mut Graph, h: Var, ps: &mut impl Iterator<Item = Var>) -> Result<Var, NumericsError> {
    let (w, b) = pair(ps);
    let z = g.dense(h, w, b)?;
    Ok(g.relu(z))
}
