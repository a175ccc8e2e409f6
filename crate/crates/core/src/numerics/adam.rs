use super::{NumericsError, Tensor};

/// A trainable tensor with its accumulated gradient.
#[derive(Debug, Clone, PartialEq)]
pub struct Parameter {
    pub name: String,
    pub value: Tensor,
    pub grad: Option<Tensor>,
}

impl Parameter {
    pub fn new(name: impl Into<String>, value: Tensor) -> Self {
        Self { name: name.into(), value, grad: None }
    }

    /// Adds `g` into the gradient slot, allocating it on first use.
    pub fn accumulate_grad(&mut self, g: &[f64]) {
        assert_eq!(g.len(), self.value.len(), "gradient length for {}", self.name);
        match &mut self.grad {
            Some(t) => {
                for (a, b) in t.data_mut().iter_mut().zip(g) {
                    *a += b;
                }
            }
            None => self.grad = Some(Tensor::new(self.value.shape().to_vec(), g.to_vec()).expect("same shape")),
        }
    }

    pub fn zero_grad(&mut self) {
        self.grad = None;
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdamConfig {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        Self { lr: 1e-3, beta1: 0.9, beta2: 0.999, eps: 1e-8 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdamState {
    pub config: AdamConfig,
    pub t: u64,
    m: Vec<Vec<f64>>,
    v: Vec<Vec<f64>>,
}

impl AdamState {
    pub fn new(config: AdamConfig, params: &[Parameter]) -> Self {
        let zeros = || params.iter().map(|p| vec![0.0; p.value.len()]).collect();
        Self { config, t: 0, m: zeros(), v: zeros() }
    }

    pub fn step(&mut self, params: &mut [Parameter]) -> Result<(), NumericsError> {
        adam_step(params, self)
    }
}

/// One bias-corrected Adam update; gradients are cleared afterwards.
pub fn adam_step(params: &mut [Parameter], st: &mut AdamState) -> Result<(), NumericsError> {
    if let Some(index) = params.iter().position(|p| p.grad.is_none()) {
        return Err(NumericsError::MissingGradient { index });
    }
    assert_eq!(params.len(), st.m.len(), "optimiser state built for a different parameter list");
    st.t += 1;
    let AdamConfig { lr, beta1, beta2, eps } = st.config;
    let bc1 = 1.0 - beta1.powi(st.t as i32);
    let bc2 = 1.0 - beta2.powi(st.t as i32);
    for ((p, m), v) in params.iter_mut().zip(&mut st.m).zip(&mut st.v) {
        let g = p.grad.take().expect("checked above");
        for (((w, g), m), v) in p.value.data_mut().iter_mut().zip(g.data()).zip(m.iter_mut()).zip(v.iter_mut()) {
            *m = beta1 * *m + (1.0 - beta1) * g;
            *v = beta2 * *v + (1.0 - beta2) * g * g;
            let m_hat = *m / bc1;
            let v_hat = *v / bc2;
            *w -= lr * m_hat / (v_hat.sqrt() + eps);
        }
    }
    Ok(())
}
