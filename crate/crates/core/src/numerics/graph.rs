use super::gemm::{gemm, View};
use super::{NumericsError, Tensor};

/// Dense layers with at most this many rows use direct dot products
/// instead of the packed GEMM kernel. The two paths agree to rounding, not
/// bitwise.
const SMALL_BATCH: usize = 8;

/// Dot product with eight independent partial sums.
fn dot(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = [0.0; 8];
    let (ca, cb) = (a.chunks_exact(8), b.chunks_exact(8));
    let (ra, rb) = (ca.remainder(), cb.remainder());
    for (x, y) in ca.zip(cb) {
        for i in 0..8 {
            acc[i] += x[i] * y[i];
        }
    }
    let tail: f64 = ra.iter().zip(rb).map(|(x, y)| x * y).sum();
    acc.iter().sum::<f64>() + tail
}

/// Handle to a node on a [`Graph`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Var(usize);

impl Var {
    pub fn index(self) -> usize {
        self.0
    }
}

#[derive(Debug)]
enum Op {
    Leaf,
    Dense { x: Var, w: Var, b: Var },
    Conv2d { x: Var, k: Var, b: Var, geom: ConvGeom, cols: Vec<f64> },
    Relu(Var),
    Concat { parts: Vec<Var>, axis: usize },
    Reshape(Var),
    Add(Var, Var),
    Mul(Var, Var),
    Scale(Var, f64),
    Sum(Var),
    L1 { pred: Var, target: Vec<f64> },
}

#[derive(Debug, Clone, Copy)]
struct ConvGeom {
    batch: usize,
    c_in: usize,
    h: usize,
    w: usize,
    c_out: usize,
    kr: usize,
    ks: usize,
}

impl ConvGeom {
    fn out_h(&self) -> usize {
        self.h - self.kr + 1
    }
    fn out_w(&self) -> usize {
        self.w - self.ks + 1
    }
    fn patch(&self) -> usize {
        self.c_in * self.kr * self.ks
    }
    fn positions(&self) -> usize {
        self.out_h() * self.out_w()
    }
}

#[derive(Debug)]
struct Node {
    value: Tensor,
    requires_grad: bool,
    op: Op,
}

/// Reverse-mode tape. Nodes are appended in evaluation order, so every
/// node's parents precede it and the tape is acyclic by construction.
#[derive(Debug, Default)]
pub struct Graph {
    nodes: Vec<Node>,
    grads: Vec<Option<Vec<f64>>>,
}

impl Graph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    fn push(&mut self, value: Tensor, op: Op, requires_grad: bool) -> Var {
        self.nodes.push(Node { value, requires_grad, op });
        self.grads.push(None);
        Var(self.nodes.len() - 1)
    }

    fn push_op(&mut self, value: Tensor, op: Op, parents: &[Var]) -> Var {
        let rg = parents.iter().any(|p| self.nodes[p.0].requires_grad);
        self.push(value, op, rg)
    }

    /// Constant input; no gradient is tracked.
    pub fn constant(&mut self, t: Tensor) -> Var {
        self.push(t, Op::Leaf, false)
    }

    /// Trainable leaf; its gradient is filled by [`Graph::backward`].
    pub fn param(&mut self, t: Tensor) -> Var {
        self.push(t, Op::Leaf, true)
    }

    pub fn value(&self, v: Var) -> &Tensor {
        &self.nodes[v.0].value
    }

    pub fn requires_grad(&self, v: Var) -> bool {
        self.nodes[v.0].requires_grad
    }

    pub fn grad_data(&self, v: Var) -> Option<&[f64]> {
        self.grads[v.0].as_deref()
    }

    pub fn grad(&self, v: Var) -> Option<Tensor> {
        let g = self.grads[v.0].as_ref()?;
        Some(Tensor::new(self.value(v).shape().to_vec(), g.clone()).expect("grad matches value shape"))
    }

    /// `y = W·x + b` for `x: [n_in]` or a batch `x: [B, n_in]`, with
    /// `W: [n_out, n_in]` and `b: [n_out]`.
    pub fn dense(&mut self, x: Var, w: Var, b: Var) -> Result<Var, NumericsError> {
        let (xs, ws, bs) = (self.value(x).shape(), self.value(w).shape(), self.value(b).shape());
        let (batch, n_in, batched) = match xs {
            [n] => (1, *n, false),
            [bt, n] => (*bt, *n, true),
            _ => return Err(NumericsError::shape("dense", format!("input shape {xs:?}"))),
        };
        let n_out = match ws {
            [o, i] if *i == n_in => *o,
            _ => return Err(NumericsError::shape("dense", format!("weight {ws:?} vs input {xs:?}"))),
        };
        if bs != [n_out] {
            return Err(NumericsError::shape("dense", format!("bias {bs:?} vs {n_out} outputs")));
        }
        let mut y = vec![0.0; batch * n_out];
        if batch <= SMALL_BATCH {
            let wd = self.value(w).data();
            for (xr, yr) in self.value(x).data().chunks(n_in).zip(y.chunks_mut(n_out)) {
                for (yv, wr) in yr.iter_mut().zip(wd.chunks(n_in)) {
                    *yv = dot(xr, wr);
                }
            }
        } else {
            gemm(
                batch,
                n_in,
                n_out,
                View::row_major(self.value(x).data(), n_in),
                View::transposed(self.value(w).data(), n_in),
                0.0,
                &mut y,
            );
        }
        let bias = self.value(b).data();
        for row in y.chunks_mut(n_out) {
            for (v, bb) in row.iter_mut().zip(bias) {
                *v += bb;
            }
        }
        let shape = if batched { vec![batch, n_out] } else { vec![n_out] };
        let out = Tensor::new(shape, y).expect("dense output shape");
        Ok(self.push_op(out, Op::Dense { x, w, b }, &[x, w, b]))
    }

    /// Valid cross-correlation, stride 1. `x: [C, H, W]` or `[B, C, H, W]`,
    /// `k: [C_out, C, r, s]`, `b: [C_out]`.
    pub fn conv2d(&mut self, x: Var, k: Var, b: Var) -> Result<Var, NumericsError> {
        let (xs, ks, bs) = (self.value(x).shape(), self.value(k).shape(), self.value(b).shape());
        let (batch, c_in, h, w, batched) = match xs {
            [c, h, w] => (1, *c, *h, *w, false),
            [bt, c, h, w] => (*bt, *c, *h, *w, true),
            _ => return Err(NumericsError::shape("conv2d", format!("input shape {xs:?}"))),
        };
        let (c_out, kr, kss) = match ks {
            [o, c, r, s] if *c == c_in => (*o, *r, *s),
            _ => return Err(NumericsError::shape("conv2d", format!("kernel {ks:?} vs input {xs:?}"))),
        };
        if kr == 0 || kss == 0 || kr > h || kss > w {
            return Err(NumericsError::KernelTooLarge { kernel: ks.to_vec(), input: xs.to_vec() });
        }
        if bs != [c_out] {
            return Err(NumericsError::shape("conv2d", format!("bias {bs:?} vs {c_out} channels")));
        }
        let geom = ConvGeom { batch, c_in, h, w, c_out, kr, ks: kss };
        let (patch, pos) = (geom.patch(), geom.positions());
        let xd = self.value(x).data();
        let kd = self.value(k).data();
        let bias = self.value(b).data();
        let mut cols = vec![0.0; batch * patch * pos];
        let mut out = vec![0.0; batch * c_out * pos];
        for bi in 0..batch {
            let cb = &mut cols[bi * patch * pos..(bi + 1) * patch * pos];
            im2col(&xd[bi * c_in * h * w..(bi + 1) * c_in * h * w], &geom, cb);
            let ob = &mut out[bi * c_out * pos..(bi + 1) * c_out * pos];
            gemm(c_out, patch, pos, View::row_major(kd, patch), View::row_major(cb, pos), 0.0, ob);
            for (o, row) in ob.chunks_mut(pos).enumerate() {
                for v in row {
                    *v += bias[o];
                }
            }
        }
        let shape = if batched {
            vec![batch, c_out, geom.out_h(), geom.out_w()]
        } else {
            vec![c_out, geom.out_h(), geom.out_w()]
        };
        let needs_cols = self.requires_grad(k) || self.requires_grad(x);
        let cols = if needs_cols { cols } else { Vec::new() };
        let out = Tensor::new(shape, out).expect("conv output shape");
        Ok(self.push_op(out, Op::Conv2d { x, k, b, geom, cols }, &[x, k, b]))
    }

    pub fn relu(&mut self, x: Var) -> Var {
        let v = self.value(x);
        let out = Tensor::new(v.shape().to_vec(), v.data().iter().map(|&a| a.max(0.0)).collect())
            .expect("same shape");
        self.push_op(out, Op::Relu(x), &[x])
    }

    /// Joins tensors along `axis`; all other dimensions must agree.
    pub fn concat(&mut self, parts: &[Var], axis: usize) -> Result<Var, NumericsError> {
        let first = parts.first().ok_or_else(|| NumericsError::shape("concat", "no inputs"))?;
        let base = self.value(*first).shape().to_vec();
        if axis >= base.len() {
            return Err(NumericsError::shape("concat", format!("axis {axis} on rank {}", base.len())));
        }
        let mut total = 0;
        for p in parts {
            let s = self.value(*p).shape();
            let agree = s.len() == base.len() && s.iter().zip(&base).enumerate().all(|(i, (a, b))| i == axis || a == b);
            if !agree {
                return Err(NumericsError::shape("concat", format!("{s:?} vs {base:?} on axis {axis}")));
            }
            total += s[axis];
        }
        let outer: usize = base[..axis].iter().product();
        let inner: Vec<usize> = parts.iter().map(|p| self.value(*p).len() / outer.max(1)).collect();
        let mut data = Vec::with_capacity(outer * inner.iter().sum::<usize>());
        for o in 0..outer {
            for (p, &n) in parts.iter().zip(&inner) {
                data.extend_from_slice(&self.value(*p).data()[o * n..(o + 1) * n]);
            }
        }
        let mut shape = base;
        shape[axis] = total;
        let out = Tensor::new(shape, data).expect("concat shape");
        Ok(self.push_op(out, Op::Concat { parts: parts.to_vec(), axis }, parts))
    }

    pub fn reshape(&mut self, x: Var, shape: &[usize]) -> Result<Var, NumericsError> {
        let out = self.value(x).reshape(shape)?;
        Ok(self.push_op(out, Op::Reshape(x), &[x]))
    }

    /// Rank-1 view in row-major order.
    pub fn flatten(&mut self, x: Var) -> Var {
        let n = self.value(x).len();
        self.reshape(x, &[n]).expect("flatten preserves length")
    }

    /// Keeps the leading (batch) dimension and flattens the rest.
    pub fn flatten_batch(&mut self, x: Var) -> Var {
        let s = self.value(x).shape();
        let b = s.first().copied().unwrap_or(1);
        let rest = self.value(x).len() / b.max(1);
        self.reshape(x, &[b, rest]).expect("flatten preserves length")
    }

    fn same_shape(&self, op: &'static str, a: Var, b: Var) -> Result<(), NumericsError> {
        let (sa, sb) = (self.value(a).shape(), self.value(b).shape());
        if sa != sb {
            return Err(NumericsError::shape(op, format!("{sa:?} vs {sb:?}")));
        }
        Ok(())
    }

    pub fn add(&mut self, a: Var, b: Var) -> Result<Var, NumericsError> {
        self.same_shape("add", a, b)?;
        let data = self.value(a).data().iter().zip(self.value(b).data()).map(|(x, y)| x + y).collect();
        let out = Tensor::new(self.value(a).shape().to_vec(), data).expect("same shape");
        Ok(self.push_op(out, Op::Add(a, b), &[a, b]))
    }

    /// Elementwise product.
    pub fn mul(&mut self, a: Var, b: Var) -> Result<Var, NumericsError> {
        self.same_shape("mul", a, b)?;
        let data = self.value(a).data().iter().zip(self.value(b).data()).map(|(x, y)| x * y).collect();
        let out = Tensor::new(self.value(a).shape().to_vec(), data).expect("same shape");
        Ok(self.push_op(out, Op::Mul(a, b), &[a, b]))
    }

    pub fn scale(&mut self, a: Var, factor: f64) -> Var {
        let v = self.value(a);
        let out = Tensor::new(v.shape().to_vec(), v.data().iter().map(|x| x * factor).collect()).expect("same shape");
        self.push_op(out, Op::Scale(a, factor), &[a])
    }

    pub fn sum(&mut self, a: Var) -> Var {
        let out = Tensor::scalar(self.value(a).data().iter().sum());
        self.push_op(out, Op::Sum(a), &[a])
    }

    /// Mean absolute error against `target`; the subgradient at zero error is 0.
    pub fn l1_loss(&mut self, pred: Var, target: &[f64]) -> Result<Var, NumericsError> {
        let p = self.value(pred).data();
        if p.len() != target.len() || p.is_empty() {
            return Err(NumericsError::shape("l1_loss", format!("{} predictions vs {} targets", p.len(), target.len())));
        }
        let loss = p.iter().zip(target).map(|(a, b)| (a - b).abs()).sum::<f64>() / p.len() as f64;
        let out = Tensor::scalar(loss);
        Ok(self.push_op(out, Op::L1 { pred, target: target.to_vec() }, &[pred]))
    }

    /// Reverse sweep from a scalar `loss`. Gradients from earlier sweeps
    /// are discarded; within one sweep they accumulate over every use.
    pub fn backward(&mut self, loss: Var) -> Result<(), NumericsError> {
        if self.value(loss).len() != 1 {
            return Err(NumericsError::NotScalarLoss { shape: self.value(loss).shape().to_vec() });
        }
        for g in &mut self.grads {
            *g = None;
        }
        self.grads[loss.0] = Some(vec![1.0]);
        for i in (0..=loss.0).rev() {
            if !self.nodes[i].requires_grad {
                continue;
            }
            let Some(gy) = self.grads[i].take() else { continue };
            self.propagate(i, &gy);
            self.grads[i] = Some(gy);
        }
        Ok(())
    }

    fn propagate(&mut self, i: usize, gy: &[f64]) {
        let (nodes, grads) = (&self.nodes, &mut self.grads);
        match &nodes[i].op {
            Op::Leaf => {}
            Op::Dense { x, w, b } => {
                let n_out = nodes[b.0].value.len();
                let n_in = nodes[w.0].value.len() / n_out;
                let batch = nodes[x.0].value.len() / n_in;
                if nodes[x.0].requires_grad {
                    let wd = nodes[w.0].value.data();
                    let gx = buf(nodes, grads, *x).unwrap();
                    gemm(batch, n_out, n_in, View::row_major(gy, n_out), View::row_major(&wd, n_in), 1.0, gx);
                }
                if nodes[w.0].requires_grad {
                    let xd = nodes[x.0].value.data();
                    let gw = buf(nodes, grads, *w).unwrap();
                    gemm(n_out, batch, n_in, View::transposed(gy, n_out), View::row_major(&xd, n_in), 1.0, gw);
                }
                if let Some(gb) = buf(nodes, grads, *b) {
                    for row in gy.chunks(n_out) {
                        for (g, r) in gb.iter_mut().zip(row) {
                            *g += r;
                        }
                    }
                }
            }
            Op::Conv2d { x, k, b, geom, cols } => {
                let (patch, pos, c_out) = (geom.patch(), geom.positions(), geom.c_out);
                if nodes[k.0].requires_grad {
                    let gk = buf(nodes, grads, *k).unwrap();
                    for bi in 0..geom.batch {
                        let gout = &gy[bi * c_out * pos..(bi + 1) * c_out * pos];
                        let cb = &cols[bi * patch * pos..(bi + 1) * patch * pos];
                        gemm(c_out, pos, patch, View::row_major(gout, pos), View::transposed(cb, pos), 1.0, gk);
                    }
                }
                if nodes[x.0].requires_grad {
                    let kd = nodes[k.0].value.data();
                    let mut dcols = vec![0.0; patch * pos];
                    let img = geom.c_in * geom.h * geom.w;
                    let gx = buf(nodes, grads, *x).unwrap();
                    for bi in 0..geom.batch {
                        let gout = &gy[bi * c_out * pos..(bi + 1) * c_out * pos];
                        gemm(patch, c_out, pos, View::transposed(&kd, patch), View::row_major(gout, pos), 0.0, &mut dcols);
                        col2im_add(&dcols, geom, &mut gx[bi * img..(bi + 1) * img]);
                    }
                }
                if let Some(gb) = buf(nodes, grads, *b) {
                    for bi in 0..geom.batch {
                        for (o, row) in gy[bi * c_out * pos..(bi + 1) * c_out * pos].chunks(pos).enumerate() {
                            gb[o] += row.iter().sum::<f64>();
                        }
                    }
                }
            }
            Op::Relu(x) => {
                let xd = nodes[x.0].value.data();
                if let Some(gx) = buf(nodes, grads, *x) {
                    for ((g, &a), &up) in gx.iter_mut().zip(xd).zip(gy) {
                        if a > 0.0 {
                            *g += up;
                        }
                    }
                }
            }
            Op::Concat { parts, axis } => {
                let shape = nodes[i].value.shape().to_vec();
                let outer: usize = shape[..*axis].iter().product();
                let inner: Vec<usize> = parts.iter().map(|p| nodes[p.0].value.len() / outer.max(1)).collect();
                let row: usize = inner.iter().sum();
                let mut offset = 0;
                for (p, &n) in parts.iter().zip(&inner) {
                    if let Some(gp) = buf(nodes, grads, *p) {
                        for o in 0..outer {
                            let src = &gy[o * row + offset..o * row + offset + n];
                            for (g, s) in gp[o * n..(o + 1) * n].iter_mut().zip(src) {
                                *g += s;
                            }
                        }
                    }
                    offset += n;
                }
            }
            Op::Reshape(x) => {
                if let Some(gx) = buf(nodes, grads, *x) {
                    for (g, s) in gx.iter_mut().zip(gy) {
                        *g += s;
                    }
                }
            }
            Op::Add(a, b) => {
                for v in [*a, *b] {
                    if let Some(g) = buf(nodes, grads, v) {
                        for (g, s) in g.iter_mut().zip(gy) {
                            *g += s;
                        }
                    }
                }
            }
            Op::Mul(a, b) => {
                let ad = nodes[a.0].value.data();
                let bd = nodes[b.0].value.data();
                if let Some(ga) = buf(nodes, grads, *a) {
                    for ((g, s), y) in ga.iter_mut().zip(gy).zip(bd) {
                        *g += s * y;
                    }
                }
                if let Some(gb) = buf(nodes, grads, *b) {
                    for ((g, s), x) in gb.iter_mut().zip(gy).zip(ad) {
                        *g += s * x;
                    }
                }
            }
            Op::Scale(a, f) => {
                if let Some(g) = buf(nodes, grads, *a) {
                    for (g, s) in g.iter_mut().zip(gy) {
                        *g += s * f;
                    }
                }
            }
            Op::Sum(a) => {
                if let Some(g) = buf(nodes, grads, *a) {
                    for g in g.iter_mut() {
                        *g += gy[0];
                    }
                }
            }
            Op::L1 { pred, target } => {
                let pd = nodes[pred.0].value.data();
                let n = pd.len() as f64;
                if let Some(g) = buf(nodes, grads, *pred) {
                    for ((g, p), t) in g.iter_mut().zip(pd).zip(target) {
                        let d = p - t;
                        let sign = if d > 0.0 {
                            1.0
                        } else if d < 0.0 {
                            -1.0
                        } else {
                            0.0
                        };
                        *g += gy[0] * sign / n;
                    }
                }
            }
        }
    }
}

fn buf<'a>(nodes: &[Node], grads: &'a mut [Option<Vec<f64>>], v: Var) -> Option<&'a mut Vec<f64>> {
    if !nodes[v.0].requires_grad {
        return None;
    }
    let n = nodes[v.0].value.len();
    Some(grads[v.0].get_or_insert_with(|| vec![0.0; n]))
}

/// `cols[(c·r + i)·s + j][oy·W_out + ox] = x[c][oy + i][ox + j]`.
fn im2col(x: &[f64], g: &ConvGeom, cols: &mut [f64]) {
    let (oh, ow, pos) = (g.out_h(), g.out_w(), g.positions());
    for c in 0..g.c_in {
        for i in 0..g.kr {
            for j in 0..g.ks {
                let q = (c * g.kr + i) * g.ks + j;
                let dst = &mut cols[q * pos..(q + 1) * pos];
                for oy in 0..oh {
                    let src = &x[c * g.h * g.w + (oy + i) * g.w + j..][..ow];
                    dst[oy * ow..(oy + 1) * ow].copy_from_slice(src);
                }
            }
        }
    }
}

fn col2im_add(cols: &[f64], g: &ConvGeom, gx: &mut [f64]) {
    let (oh, ow, pos) = (g.out_h(), g.out_w(), g.positions());
    for c in 0..g.c_in {
        for i in 0..g.kr {
            for j in 0..g.ks {
                let q = (c * g.kr + i) * g.ks + j;
                let src = &cols[q * pos..(q + 1) * pos];
                for oy in 0..oh {
                    let dst = &mut gx[c * g.h * g.w + (oy + i) * g.w + j..][..ow];
                    for (d, s) in dst.iter_mut().zip(&src[oy * ow..(oy + 1) * ow]) {
                        *d += s;
                    }
                }
            }
        }
    }
}
