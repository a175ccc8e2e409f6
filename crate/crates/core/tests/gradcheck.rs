mod common;

use common::{gradcheck_samples, gradient_check, kink_free_check, randomize_biases, GradCheck};
use reprbench::models::{build_model, Architecture, Family, ModelSpec, TrainedModel};
use reprbench::numerics::seeded_rng;
use reprbench::transforms::ReprKind;

const EPS: f64 = 1e-5;
const TOL: f64 = 1e-3;

fn model(spec: ModelSpec, seed: u64) -> TrainedModel {
    let mut m = build_model(spec, &mut seeded_rng(seed)).unwrap();
    randomize_biases(&mut m, seed + 100);
    m
}

fn assert_ok(what: &str, (draw, r): (u64, GradCheck), expected: usize) {
    assert_eq!(r.kinks, 0, "{what}: every draw up to {draw} straddles a kink");
    assert_eq!(r.checked, expected, "{what}: checked {} of {expected}", r.checked);
    assert!(r.max_rel_error < TOL, "{what}: relative error {:.3e} at {:?}", r.max_rel_error, r.worst);
}

#[test]
fn fcn_every_parameter() {
    for (seed, repr) in [(1, ReprKind::Naive), (2, ReprKind::NaiveDifferences)] {
        let spec = ModelSpec::new(Family::Fcn, repr, 1);
        let r = kink_free_check(5, |d| {
            let m = model(spec.clone(), seed + 1000 * d);
            gradient_check(&m, &gradcheck_samples(repr, 1, 168, 4, seed + 10 + 1000 * d), EPS, |_, _| true)
        });
        assert_ok("fcn", r, 32_257);
    }
}

#[test]
fn mlp10_every_parameter() {
    for (seed, repr) in [(3, ReprKind::Naive), (4, ReprKind::NaiveDifferences)] {
        let spec = ModelSpec::new(Family::Mlp10, repr, 24);
        let r = kink_free_check(5, |d| {
            let m = model(spec.clone(), seed + 1000 * d);
            gradient_check(&m, &gradcheck_samples(repr, 1, 168, 4, seed + 10 + 1000 * d), EPS, |_, _| true)
        });
        assert_ok("mlp10", r, 1_781);
    }
}

#[test]
fn narrow_cnn_every_parameter() {
    for (seed, repr) in [(5, ReprKind::Reshaped), (6, ReprKind::ReshapedDifferences)] {
        let mut spec = ModelSpec::new(Family::Cnn, repr, 1);
        spec.arch = Architecture { cnn_filters: vec![2, 3], cnn_head: vec![6, 5, 4], ..Architecture::default() };
        let count = model(spec.clone(), 0).parameter_count();
        let r = kink_free_check(5, |d| {
            let m = model(spec.clone(), seed + 1000 * d);
            gradient_check(&m, &gradcheck_samples(repr, 7, 24, 3, seed + 10 + 1000 * d), EPS, |_, _| true)
        });
        assert_ok("narrow cnn", r, count);
    }
}

#[test]
fn full_cnn_convolutions_and_sampled_dense_weights() {
    let spec = ModelSpec::new(Family::Cnn, ReprKind::Reshaped, 1);
    let sizes: Vec<usize> = model(spec.clone(), 0).network_params().unwrap().iter().map(|p| p.value.len()).collect();
    // Tensors 0..4 are the two convolutions; dense tensors are strided.
    let expected: usize = sizes.iter().enumerate().map(|(t, &n)| if t < 4 { n } else { n.div_ceil(211) }).sum();
    let r = kink_free_check(5, |d| {
        let m = model(spec.clone(), 7 + 1000 * d);
        gradient_check(&m, &gradcheck_samples(ReprKind::Reshaped, 7, 24, 2, 17 + 1000 * d), EPS, |t, j| t < 4 || j % 211 == 0)
    });
    assert_ok("cnn", r, expected);
}
