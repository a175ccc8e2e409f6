//! Reverse-mode gradients on a tiny dense network, checked against central
//! differences, followed by a few Adam steps.

use reprbench::numerics::{AdamConfig, AdamState, Graph, Parameter, Tensor};

fn loss(params: &[Parameter], x: &Tensor, y: &[f64], with_grad: bool) -> (f64, Vec<Vec<f64>>) {
    let mut g = Graph::new();
    let vars: Vec<_> = params.iter().map(|p| g.param(p.value.clone())).collect();
    let xv = g.constant(x.clone());
    let h = g.dense(xv, vars[0], vars[1]).unwrap();
    let h = g.relu(h);
    let out = g.dense(h, vars[2], vars[3]).unwrap();
    let l = g.l1_loss(out, y).unwrap();
    let value = g.value(l).item();
    if !with_grad {
        return (value, Vec::new());
    }
    g.backward(l).unwrap();
    (value, vars.iter().map(|v| g.grad_data(*v).unwrap().to_vec()).collect())
}

fn main() {
    let t = |shape: &[usize], data: Vec<f64>| Tensor::new(shape.to_vec(), data).unwrap();
    let mut params = vec![
        Parameter::new("w1", t(&[3, 2], vec![0.5, -0.3, 0.8, 0.1, -0.6, 0.9])),
        Parameter::new("b1", t(&[3], vec![0.15, 0.2, 0.35])),
        Parameter::new("w2", t(&[1, 3], vec![0.7, -0.4, 0.5])),
        Parameter::new("b2", t(&[1], vec![0.05])),
    ];
    let x = t(&[4, 2], vec![1.0, 2.0, -1.0, 0.5, 0.3, -0.7, 2.0, 1.0]);
    let y = [3.0, 0.0, -1.0, 2.5];

    let (l0, grads) = loss(&params, &x, &y, true);
    println!("loss {l0:.6}");
    let eps = 1e-6;
    for (i, g) in grads.iter().enumerate() {
        for j in 0..g.len() {
            let mut p = params.clone();
            p[i].value.data_mut()[j] += eps;
            let up = loss(&p, &x, &y, false).0;
            p[i].value.data_mut()[j] -= 2.0 * eps;
            let down = loss(&p, &x, &y, false).0;
            println!("d/d{}[{j}]  reverse {:+.6}  central {:+.6}", params[i].name, g[j], (up - down) / (2.0 * eps));
        }
    }

    let mut adam = AdamState::new(AdamConfig { lr: 0.02, ..AdamConfig::default() }, &params);
    for step in 1..=200 {
        let (l, grads) = loss(&params, &x, &y, true);
        for (p, g) in params.iter_mut().zip(&grads) {
            p.accumulate_grad(g);
        }
        adam.step(&mut params).unwrap();
        if step % 50 == 0 {
            println!("adam step {step}: loss {l:.4}");
        }
    }
}
