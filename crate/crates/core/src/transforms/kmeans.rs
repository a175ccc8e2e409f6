use std::collections::HashSet;

use rand::seq::index::sample;

use super::{Matrix, TransformError};
use crate::numerics::seeded_rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KMeansConfig {
    pub k: usize,
    pub max_iter: usize,
    /// Independent Lloyd runs from distinct seeded initialisations; the
    /// lowest-cost run wins.
    pub n_init: usize,
    /// When there are at most this many k-subsets of the points, every
    /// subset is tried as an initialisation instead of `n_init` draws.
    pub exhaustive_limit: usize,
    pub seed: u64,
}

impl KMeansConfig {
    pub fn new(k: usize, seed: u64) -> Self {
        Self { k, max_iter: 300, n_init: 10, exhaustive_limit: 256, seed }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KMeansResult {
    pub centroids: Matrix,
    pub assignments: Vec<usize>,
    /// Sum of squared Euclidean distances to the assigned centroid.
    pub cost: f64,
    pub iterations: usize,
    /// Cost after every assignment step of the winning run.
    pub cost_history: Vec<f64>,
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Nearest centroid, ties to the lowest index.
fn nearest(p: &[f64], centroids: &Matrix) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for c in 0..centroids.rows() {
        let d = sq_dist(p, centroids.row(c));
        if d < best.1 {
            best = (c, d);
        }
    }
    best
}

pub fn within_cluster_cost(points: &Matrix, centroids: &Matrix, assignments: &[usize]) -> f64 {
    assignments.iter().enumerate().map(|(i, &c)| sq_dist(points.row(i), centroids.row(c))).sum()
}

/// Lloyd's algorithm with the default [`KMeansConfig`].
pub fn kmeans(points: &Matrix, k: usize, seed: u64, max_iter: usize) -> Result<KMeansResult, TransformError> {
    kmeans_with(points, &KMeansConfig { max_iter, ..KMeansConfig::new(k, seed) })
}

pub fn kmeans_with(points: &Matrix, cfg: &KMeansConfig) -> Result<KMeansResult, TransformError> {
    let n = points.rows();
    if cfg.k == 0 || cfg.k > n {
        return Err(TransformError::InvalidK { k: cfg.k, n });
    }
    let mut best: Option<KMeansResult> = None;
    for init in initialisations(n, cfg) {
        let run = lloyd(points, &init, cfg.max_iter);
        if best.as_ref().is_none_or(|b| run.cost < b.cost) {
            best = Some(run);
        }
    }
    Ok(best.expect("at least one run"))
}

fn binomial_at_most(n: usize, k: usize, limit: usize) -> Option<usize> {
    let mut c: usize = 1;
    for i in 0..k.min(n - k) {
        c = c.checked_mul(n - i)? / (i + 1);
        if c > limit {
            return None;
        }
    }
    Some(c)
}

/// Every k-subset in lexicographic order when there are few enough,
/// otherwise `n_init` distinct seeded samples.
fn initialisations(n: usize, cfg: &KMeansConfig) -> Vec<Vec<usize>> {
    let k = cfg.k;
    if binomial_at_most(n, k, cfg.exhaustive_limit).is_some() {
        let mut out = Vec::new();
        let mut idx: Vec<usize> = (0..k).collect();
        loop {
            out.push(idx.clone());
            let Some(pos) = (0..k).rev().find(|&i| idx[i] < n - k + i) else {
                return out;
            };
            idx[pos] += 1;
            for j in pos + 1..k {
                idx[j] = idx[j - 1] + 1;
            }
        }
    }
    let mut rng = seeded_rng(cfg.seed);
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    let mut attempts = 0;
    while out.len() < cfg.n_init.max(1) && attempts < 100 * cfg.n_init.max(1) {
        attempts += 1;
        let init = sample(&mut rng, n, k).into_vec();
        let mut key = init.clone();
        key.sort_unstable();
        if seen.insert(key) {
            out.push(init);
        }
    }
    out
}

fn lloyd(points: &Matrix, init: &[usize], max_iter: usize) -> KMeansResult {
    let (n, d, k) = (points.rows(), points.cols(), init.len());
    let mut centroids = Matrix::new(k, d, init.iter().flat_map(|&i| points.row(i).to_vec()).collect())
        .expect("k rows of width d");
    let mut assignments = vec![usize::MAX; n];
    let mut cost_history = Vec::new();
    let mut iterations = 0;
    for _ in 0..max_iter.max(1) {
        iterations += 1;
        let mut changed = false;
        let mut cost = 0.0;
        for (i, slot) in assignments.iter_mut().enumerate() {
            let (c, dist) = nearest(points.row(i), &centroids);
            cost += dist;
            if *slot != c {
                *slot = c;
                changed = true;
            }
        }
        cost_history.push(cost);
        if !changed {
            break;
        }
        // Update step; an empty cluster keeps its previous centroid.
        let mut sums = vec![0.0; k * d];
        let mut counts = vec![0usize; k];
        for (i, &c) in assignments.iter().enumerate() {
            counts[c] += 1;
            for (s, x) in sums[c * d..(c + 1) * d].iter_mut().zip(points.row(i)) {
                *s += x;
            }
        }
        for c in 0..k {
            if counts[c] > 0 {
                for j in 0..d {
                    centroids.set(c, j, sums[c * d + j] / counts[c] as f64);
                }
            }
        }
    }
    refine(points, &mut centroids, &mut assignments, &mut cost_history);
    let cost = within_cluster_cost(points, &centroids, &assignments);
    KMeansResult { centroids, assignments, cost, iterations, cost_history }
}

/// Hartigan single-point moves: relocates a point whenever that strictly
/// lowers the cost, with exact centroid updates, until no move helps.
fn refine(points: &Matrix, centroids: &mut Matrix, assignments: &mut [usize], cost_history: &mut Vec<f64>) {
    let (n, d, k) = (points.rows(), points.cols(), centroids.rows());
    let mut counts = vec![0usize; k];
    for &c in assignments.iter() {
        counts[c] += 1;
    }
    let mut moved = true;
    let mut sweeps = 0;
    while moved && sweeps < 100 {
        moved = false;
        sweeps += 1;
        for i in 0..n {
            let a = assignments[i];
            if counts[a] < 2 {
                continue;
            }
            let p = points.row(i);
            let na = counts[a] as f64;
            let gain = na / (na - 1.0) * sq_dist(p, centroids.row(a));
            let mut target = None;
            let mut best = gain;
            for b in (0..k).filter(|&b| b != a) {
                let nb = counts[b] as f64;
                let cost = nb / (nb + 1.0) * sq_dist(p, centroids.row(b));
                if cost < best * (1.0 - 1e-12) {
                    best = cost;
                    target = Some(b);
                }
            }
            let Some(b) = target else { continue };
            let nb = counts[b] as f64;
            for j in 0..d {
                let x = p[j];
                centroids.set(a, j, (centroids.get(a, j) * na - x) / (na - 1.0));
                centroids.set(b, j, (centroids.get(b, j) * nb + x) / (nb + 1.0));
            }
            counts[a] -= 1;
            counts[b] += 1;
            assignments[i] = b;
            moved = true;
        }
        if moved {
            cost_history.push(within_cluster_cost(points, centroids, assignments));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_separated_groups() {
        let pts = Matrix::new(4, 1, vec![0.0, 0.1, 10.0, 10.1]).unwrap();
        let r = kmeans(&pts, 2, 7, 100).unwrap();
        let mut cs: Vec<f64> = r.centroids.as_slice().to_vec();
        cs.sort_by(f64::total_cmp);
        assert!((cs[0] - 0.05).abs() < 1e-12);
        assert!((cs[1] - 10.05).abs() < 1e-12);
        assert_eq!(r.assignments[0], r.assignments[1]);
        assert_eq!(r.assignments[2], r.assignments[3]);
        assert_ne!(r.assignments[0], r.assignments[2]);
    }

    #[test]
    fn k_equals_n_has_zero_cost() {
        let pts = Matrix::from_rows(&[vec![0.0, 1.0], vec![5.0, 5.0], vec![-3.0, 2.0]]);
        let r = kmeans(&pts, 3, 1, 50).unwrap();
        assert_eq!(r.cost, 0.0);
    }

    #[test]
    fn invalid_k() {
        let pts = Matrix::zeros(3, 2);
        assert_eq!(kmeans(&pts, 0, 1, 10), Err(TransformError::InvalidK { k: 0, n: 3 }));
        assert_eq!(kmeans(&pts, 4, 1, 10), Err(TransformError::InvalidK { k: 4, n: 3 }));
    }

    #[test]
    fn cost_never_increases() {
        let mut rng = seeded_rng(3);
        use rand::Rng;
        let data: Vec<f64> = (0..200).map(|_| rng.gen::<f64>() * 10.0).collect();
        let pts = Matrix::new(100, 2, data).unwrap();
        let r = kmeans_with(&pts, &KMeansConfig { n_init: 1, ..KMeansConfig::new(5, 11) }).unwrap();
        for w in r.cost_history.windows(2) {
            assert!(w[1] <= w[0] + 1e-12, "{:?}", r.cost_history);
        }
    }

    #[test]
    fn same_seed_same_result() {
        let pts = Matrix::new(6, 1, vec![1.0, 2.0, 3.0, 10.0, 11.0, 30.0]).unwrap();
        assert_eq!(kmeans(&pts, 3, 5, 100).unwrap(), kmeans(&pts, 3, 5, 100).unwrap());
    }

    #[test]
    fn small_instances_enumerate_every_subset() {
        let cfg = KMeansConfig::new(3, 0);
        let inits = initialisations(8, &cfg);
        assert_eq!(inits.len(), 56);
        assert_eq!(inits[0], vec![0, 1, 2]);
        assert_eq!(inits[55], vec![5, 6, 7]);
        let big = initialisations(40, &cfg);
        assert_eq!(big.len(), 10);
    }

    #[test]
    fn refinement_escapes_a_lloyd_fixed_point() {
        // Plain Lloyd from {0, 4} stops at {0, 2} | {3, 4} with cost 2.5.
        let pts = Matrix::new(4, 1, vec![0.0, 2.0, 3.0, 4.0]).unwrap();
        let r = lloyd(&pts, &[0, 3], 100);
        assert_eq!(r.cost_history[r.iterations - 1], 2.5);
        assert!((r.cost - 2.0).abs() < 1e-12, "{}", r.cost);
        assert_eq!(r.assignments, vec![0, 1, 1, 1]);
    }
}
