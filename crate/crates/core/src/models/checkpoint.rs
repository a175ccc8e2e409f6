//! Text checkpoints of trained models.
//!
//! A checkpoint is UTF-8, one record per line, fields separated by single
//! spaces. Floats use Rust's shortest round-trip exponent form (`{:e}`), so
//! save → load reproduces every bit. Lines appear in this fixed order:
//!
//! ```text
//! REPRBENCH-MODEL v1
//! family <linear|fcn|cnn|mlp10>
//! repr <naive|naive_differences|reshaped|reshaped_differences>
//! horizon <hours>
//! layout <window> <rows> <cols>
//! fcn_encoder <width>...
//! fcn_head <width>...
//! cnn_filters <count>...
//! cnn_kernel <side>
//! cnn_head <width>...
//! mlp_hidden <width>
//! lr <float>
//! batch_size <n>
//! max_epochs <n>
//! patience <n>
//! seed <u64|none>
//! best_val_mae <float|none>
//! input_mean <n> <float>...
//! input_std <n> <float>...
//! calendar_mean <n> <float>...
//! calendar_std <n> <float>...
//! target_mean <float>
//! target_std <float>
//! ```
//!
//! followed by either
//!
//! ```text
//! params network <tensor count>
//! tensor <name> <rank> <dim>...      (one header line per tensor)
//! <float>...                        (its row-major values on the next line)
//! ```
//!
//! or
//!
//! ```text
//! params linear
//! intercept <float>
//! differenced <true|false>
//! history_weights <n> <float>...
//! calendar_weights <n> <float>...
//! ```
//!
//! and a final `end` line. The per-epoch training history is not stored.

use std::fmt::Write as _;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::str::FromStr;

use crate::numerics::{Parameter, Tensor};
use crate::transforms::{ReprKind, ReprLayout};

use super::linear::LinearModel;
use super::train::{ModelParams, Normalization, TrainedModel};
use super::{Architecture, Family, ModelError, ModelSpec, TrainingConfig};

pub const CHECKPOINT_HEADER: &str = "REPRBENCH-MODEL v1";

fn floats(v: &[f64]) -> String {
    let mut s = String::new();
    for (i, x) in v.iter().enumerate() {
        if i > 0 {
            s.push(' ');
        }
        write!(s, "{x:e}").unwrap();
    }
    s
}

fn ints(v: &[usize]) -> String {
    v.iter().map(usize::to_string).collect::<Vec<_>>().join(" ")
}

fn counted(key: &str, v: &[f64]) -> String {
    if v.is_empty() {
        format!("{key} 0")
    } else {
        format!("{key} {} {}", v.len(), floats(v))
    }
}

fn line(key: &str, rest: &str) -> String {
    if rest.is_empty() {
        key.to_string()
    } else {
        format!("{key} {rest}")
    }
}

pub fn write_checkpoint<W: Write>(mut w: W, m: &TrainedModel) -> std::io::Result<()> {
    let s = &m.spec;
    let a = &s.arch;
    let n = &m.normalization;
    let opt = |v: Option<String>| v.unwrap_or_else(|| "none".into());
    let mut lines = vec![
        CHECKPOINT_HEADER.to_string(),
        format!("family {}", s.family),
        format!("repr {}", s.repr),
        format!("horizon {}", s.horizon),
        format!("layout {} {} {}", s.layout.window, s.layout.rows, s.layout.cols),
        line("fcn_encoder", &ints(&a.fcn_encoder)),
        line("fcn_head", &ints(&a.fcn_head)),
        line("cnn_filters", &ints(&a.cnn_filters)),
        format!("cnn_kernel {}", a.cnn_kernel),
        line("cnn_head", &ints(&a.cnn_head)),
        format!("mlp_hidden {}", a.mlp_hidden),
        format!("lr {:e}", s.training.lr),
        format!("batch_size {}", s.training.batch_size),
        format!("max_epochs {}", s.training.max_epochs),
        format!("patience {}", s.training.patience),
        format!("seed {}", opt(m.seed.map(|x| x.to_string()))),
        format!("best_val_mae {}", opt(m.best_val_mae.map(|x| format!("{x:e}")))),
        counted("input_mean", &n.input_mean),
        counted("input_std", &n.input_std),
        counted("calendar_mean", &n.calendar_mean),
        counted("calendar_std", &n.calendar_std),
        format!("target_mean {:e}", n.target_mean),
        format!("target_std {:e}", n.target_std),
    ];
    match &m.params {
        ModelParams::Network(ps) => {
            lines.push(format!("params network {}", ps.len()));
            for p in ps {
                let shape = p.value.shape();
                lines.push(format!("tensor {} {} {}", p.name, shape.len(), ints(shape)));
                lines.push(floats(p.value.data()));
            }
        }
        ModelParams::Linear(lm) => {
            lines.push("params linear".into());
            lines.push(format!("intercept {:e}", lm.intercept));
            lines.push(format!("differenced {}", lm.differenced));
            lines.push(counted("history_weights", &lm.history_weights));
            lines.push(counted("calendar_weights", &lm.calendar_weights));
        }
    }
    lines.push("end".into());
    for l in lines {
        writeln!(w, "{l}")?;
    }
    w.flush()
}

pub fn save_checkpoint(path: &Path, m: &TrainedModel) -> Result<(), ModelError> {
    let io = |source| ModelError::Io { path: path.display().to_string(), source };
    let f = std::fs::File::create(path).map_err(io)?;
    write_checkpoint(std::io::BufWriter::new(f), m).map_err(io)
}

pub fn load_checkpoint(path: &Path) -> Result<TrainedModel, ModelError> {
    let f = std::fs::File::open(path).map_err(|source| ModelError::Io { path: path.display().to_string(), source })?;
    read_checkpoint(BufReader::new(f))
}

struct Cursor<R> {
    lines: std::io::Lines<R>,
    line_no: usize,
}

impl<R: BufRead> Cursor<R> {
    fn err(&self, message: impl Into<String>) -> ModelError {
        ModelError::Checkpoint { line: self.line_no, message: message.into() }
    }

    fn next_line(&mut self) -> Result<String, ModelError> {
        self.line_no += 1;
        match self.lines.next() {
            Some(Ok(l)) => Ok(l),
            Some(Err(e)) => Err(self.err(e.to_string())),
            None => Err(self.err("unexpected end of file")),
        }
    }

    /// Fields after `key`.
    fn record(&mut self, key: &str) -> Result<Vec<String>, ModelError> {
        let l = self.next_line()?;
        let mut it = l.split(' ');
        match it.next() {
            Some(k) if k == key => Ok(it.filter(|s| !s.is_empty()).map(str::to_string).collect()),
            _ => Err(self.err(format!("expected `{key}`"))),
        }
    }

    fn parse<T: FromStr>(&self, s: &str) -> Result<T, ModelError> {
        s.parse().map_err(|_| self.err(format!("cannot parse `{s}`")))
    }

    fn one<T: FromStr>(&mut self, key: &str) -> Result<T, ModelError> {
        let f = self.record(key)?;
        if f.len() != 1 {
            return Err(self.err(format!("`{key}` takes one value")));
        }
        self.parse(&f[0])
    }

    fn optional<T: FromStr>(&mut self, key: &str) -> Result<Option<T>, ModelError> {
        let f = self.record(key)?;
        match f.as_slice() {
            [v] if v == "none" => Ok(None),
            [v] => self.parse(v).map(Some),
            _ => Err(self.err(format!("`{key}` takes one value"))),
        }
    }

    fn list<T: FromStr>(&mut self, key: &str) -> Result<Vec<T>, ModelError> {
        let f = self.record(key)?;
        f.iter().map(|s| self.parse(s)).collect()
    }

    fn counted(&mut self, key: &str) -> Result<Vec<f64>, ModelError> {
        let f = self.record(key)?;
        let n: usize = self.parse(f.first().ok_or_else(|| self.err("missing count"))?)?;
        if f.len() != n + 1 {
            return Err(self.err(format!("`{key}` declares {n} values, found {}", f.len() - 1)));
        }
        f[1..].iter().map(|s| self.parse(s)).collect()
    }
}

pub fn read_checkpoint<R: BufRead>(r: R) -> Result<TrainedModel, ModelError> {
    let mut c = Cursor { lines: r.lines(), line_no: 0 };
    if c.next_line()?.trim_end() != CHECKPOINT_HEADER {
        return Err(c.err(format!("missing `{CHECKPOINT_HEADER}` header")));
    }
    let family: Family = c.one("family")?;
    let repr: ReprKind = c.one("repr")?;
    let horizon = c.one("horizon")?;
    let l: Vec<usize> = c.list("layout")?;
    let layout = match l.as_slice() {
        [window, rows, cols] => ReprLayout { window: *window, rows: *rows, cols: *cols },
        _ => return Err(c.err("`layout` takes three values")),
    };
    let arch = Architecture {
        fcn_encoder: c.list("fcn_encoder")?,
        fcn_head: c.list("fcn_head")?,
        cnn_filters: c.list("cnn_filters")?,
        cnn_kernel: c.one("cnn_kernel")?,
        cnn_head: c.list("cnn_head")?,
        mlp_hidden: c.one("mlp_hidden")?,
    };
    let training = TrainingConfig {
        lr: c.one("lr")?,
        batch_size: c.one("batch_size")?,
        max_epochs: c.one("max_epochs")?,
        patience: c.one("patience")?,
    };
    let seed = c.optional("seed")?;
    let best_val_mae = c.optional("best_val_mae")?;
    let normalization = Normalization {
        input_mean: c.counted("input_mean")?,
        input_std: c.counted("input_std")?,
        calendar_mean: c.counted("calendar_mean")?,
        calendar_std: c.counted("calendar_std")?,
        target_mean: c.one("target_mean")?,
        target_std: c.one("target_std")?,
    };
    let spec = ModelSpec { family, repr, horizon, layout, arch, training };
    spec.validate()?;

    let kind = c.record("params")?;
    let params = match kind.first().map(String::as_str) {
        Some("network") => {
            let n: usize = c.parse(kind.get(1).ok_or_else(|| c.err("missing tensor count"))?)?;
            let mut ps = Vec::with_capacity(n);
            for _ in 0..n {
                let h = c.record("tensor")?;
                if h.len() < 2 {
                    return Err(c.err("tensor header needs a name and rank"));
                }
                let rank: usize = c.parse(&h[1])?;
                if h.len() != rank + 2 {
                    return Err(c.err("tensor rank and dimensions disagree"));
                }
                let shape = h[2..].iter().map(|s| c.parse(s)).collect::<Result<Vec<usize>, _>>()?;
                let body = c.next_line()?;
                let data = body.split(' ').filter(|s| !s.is_empty()).map(|s| c.parse(s)).collect::<Result<_, _>>()?;
                let t = Tensor::new(shape, data).map_err(|e| c.err(e.to_string()))?;
                ps.push(Parameter::new(h[0].clone(), t));
            }
            ModelParams::Network(ps)
        }
        Some("linear") => ModelParams::Linear(LinearModel {
            intercept: c.one("intercept")?,
            differenced: c.one("differenced")?,
            history_weights: c.counted("history_weights")?,
            calendar_weights: c.counted("calendar_weights")?,
            horizon,
        }),
        _ => return Err(c.err("expected `params network` or `params linear`")),
    };
    if c.next_line()? != "end" {
        return Err(c.err("expected `end`"));
    }
    if let ModelParams::Network(ps) = &params {
        let expected = super::param_shapes(&spec)?;
        let ok = expected.len() == ps.len()
            && expected.iter().zip(ps).all(|(e, p)| e.name == p.name && e.shape == p.value.shape());
        if !ok {
            return Err(c.err("tensors do not match the declared architecture"));
        }
    }
    Ok(TrainedModel { spec, params, normalization, seed, best_val_mae, history: Vec::new() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{build_cnn, build_fcn};
    use crate::numerics::seeded_rng;

    fn round_trip(m: &TrainedModel) -> TrainedModel {
        let mut buf = Vec::new();
        write_checkpoint(&mut buf, m).unwrap();
        read_checkpoint(buf.as_slice()).unwrap()
    }

    #[test]
    fn network_round_trip_is_exact() {
        let mut m = build_fcn(ModelSpec::new(Family::Fcn, ReprKind::NaiveDifferences, 24), &mut seeded_rng(2)).unwrap();
        m.seed = Some(2);
        m.best_val_mae = Some(0.1 + 0.2);
        m.normalization.target_mean = std::f64::consts::PI;
        m.normalization.input_std[3] = 1.0 / 3.0;
        assert_eq!(round_trip(&m), m);

        let c = build_cnn(ModelSpec::new(Family::Cnn, ReprKind::Reshaped, 1), &mut seeded_rng(5)).unwrap();
        assert_eq!(round_trip(&c), c);
    }

    #[test]
    fn linear_round_trip() {
        let mut m = TrainedModel::zeroed(ModelSpec::new(Family::Linear, ReprKind::Naive, 168)).unwrap();
        if let ModelParams::Linear(lm) = &mut m.params {
            lm.intercept = -1.25e-7;
            lm.history_weights[0] = 0.97;
            lm.calendar_weights[7] = -2.5;
        }
        assert_eq!(round_trip(&m), m);
    }

    #[test]
    fn bad_header_and_truncation() {
        assert!(matches!(
            read_checkpoint("REPRBENCH-MODEL v2\n".as_bytes()),
            Err(ModelError::Checkpoint { line: 1, .. })
        ));
        let m = TrainedModel::zeroed(ModelSpec::new(Family::Mlp10, ReprKind::Naive, 1)).unwrap();
        let mut buf = Vec::new();
        write_checkpoint(&mut buf, &m).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let cut = &text[..text.len() / 2];
        assert!(read_checkpoint(cut.as_bytes()).is_err());
    }
}
