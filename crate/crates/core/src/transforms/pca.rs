use super::{Matrix, TransformError};

#[derive(Debug, Clone, PartialEq)]
pub struct PcaResult {
    /// `n_components x d`, unit-norm rows in descending variance order.
    pub components: Matrix,
    /// Eigenvalues of the sample covariance (divisor `n - 1`).
    pub explained_variance: Vec<f64>,
    /// `explained_variance / total variance` over all `d` directions.
    pub explained_variance_ratio: Vec<f64>,
    pub mean: Vec<f64>,
    /// `(points - mean) · componentsᵀ`.
    pub projected: Matrix,
}

impl PcaResult {
    /// `projected · components + mean`.
    pub fn reconstruct(&self) -> Matrix {
        let (n, k, d) = (self.projected.rows(), self.components.rows(), self.components.cols());
        let mut out = Matrix::zeros(n, d);
        for i in 0..n {
            for j in 0..d {
                let v: f64 = (0..k).map(|c| self.projected.get(i, c) * self.components.get(c, j)).sum();
                out.set(i, j, v + self.mean[j]);
            }
        }
        out
    }
}

/// Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.
/// Returns eigenvalues in descending order and the matching eigenvectors as
/// matrix rows.
pub fn symmetric_eigen(a: &Matrix) -> (Vec<f64>, Matrix) {
    let n = a.rows();
    assert_eq!(n, a.cols(), "matrix must be square");
    let mut m = a.clone();
    let mut v = Matrix::zeros(n, n);
    for i in 0..n {
        v.set(i, i, 1.0);
    }
    for _sweep in 0..100 {
        let off: f64 = (0..n).flat_map(|p| (0..n).filter(move |&q| q != p).map(move |q| (p, q)))
            .map(|(p, q)| m.get(p, q) * m.get(p, q))
            .sum();
        let scale: f64 = (0..n).map(|i| m.get(i, i) * m.get(i, i)).sum::<f64>() + off;
        if off <= 1e-30 * scale.max(f64::MIN_POSITIVE) {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m.get(p, q);
                if apq == 0.0 {
                    continue;
                }
                let theta = (m.get(q, q) - m.get(p, p)) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                // A <- Jᵀ A J
                for k in 0..n {
                    let (akp, akq) = (m.get(k, p), m.get(k, q));
                    m.set(k, p, c * akp - s * akq);
                    m.set(k, q, s * akp + c * akq);
                }
                for k in 0..n {
                    let (apk, aqk) = (m.get(p, k), m.get(q, k));
                    m.set(p, k, c * apk - s * aqk);
                    m.set(q, k, s * apk + c * aqk);
                }
                for k in 0..n {
                    let (vkp, vkq) = (v.get(k, p), v.get(k, q));
                    v.set(k, p, c * vkp - s * vkq);
                    v.set(k, q, s * vkp + c * vkq);
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m.get(j, j).total_cmp(&m.get(i, i)));
    let values = order.iter().map(|&i| m.get(i, i)).collect();
    let mut vectors = Matrix::zeros(n, n);
    for (row, &i) in order.iter().enumerate() {
        for k in 0..n {
            vectors.set(row, k, v.get(k, i));
        }
    }
    (values, vectors)
}

/// Principal component analysis of `points` (`n x d`).
///
/// Each component's largest-magnitude entry is made positive (first one on
/// ties) so results are sign-stable.
pub fn pca(points: &Matrix, n_components: usize) -> Result<PcaResult, TransformError> {
    let (n, d) = (points.rows(), points.cols());
    if n < 2 {
        return Err(TransformError::InvalidComponents { requested: n_components, max: 0 });
    }
    let max = n.min(d);
    if n_components == 0 || n_components > max {
        return Err(TransformError::InvalidComponents { requested: n_components, max });
    }
    let mean: Vec<f64> = (0..d).map(|j| (0..n).map(|i| points.get(i, j)).sum::<f64>() / n as f64).collect();
    let mut centered = points.clone();
    for i in 0..n {
        for j in 0..d {
            centered.set(i, j, points.get(i, j) - mean[j]);
        }
    }
    let mut cov = Matrix::zeros(d, d);
    for a in 0..d {
        for b in a..d {
            let s: f64 = (0..n).map(|i| centered.get(i, a) * centered.get(i, b)).sum::<f64>() / (n - 1) as f64;
            cov.set(a, b, s);
            cov.set(b, a, s);
        }
    }
    let (values, vectors) = symmetric_eigen(&cov);
    let total: f64 = values.iter().map(|v| v.max(0.0)).sum();

    let mut components = Matrix::zeros(n_components, d);
    for c in 0..n_components {
        let row = vectors.row(c);
        let pivot = row
            .iter()
            .enumerate()
            .fold(0, |best, (j, x)| if x.abs() > row[best].abs() { j } else { best });
        let sign = if row[pivot] < 0.0 { -1.0 } else { 1.0 };
        for j in 0..d {
            components.set(c, j, sign * row[j]);
        }
    }
    let explained_variance: Vec<f64> = values[..n_components].iter().map(|v| v.max(0.0)).collect();
    let explained_variance_ratio =
        explained_variance.iter().map(|v| if total > 0.0 { v / total } else { 0.0 }).collect();
    let mut projected = Matrix::zeros(n, n_components);
    for i in 0..n {
        for c in 0..n_components {
            projected.set(i, c, (0..d).map(|j| centered.get(i, j) * components.get(c, j)).sum());
        }
    }
    Ok(PcaResult { components, explained_variance, explained_variance_ratio, mean, projected })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_y_equals_x() {
        let pts = Matrix::from_rows(&[vec![0.0, 0.0], vec![1.0, 1.0], vec![2.0, 2.0], vec![-3.0, -3.0]]);
        let r = pca(&pts, 1).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((r.components.get(0, 0) - h).abs() < 1e-12);
        assert!((r.components.get(0, 1) - h).abs() < 1e-12);
        assert!((r.explained_variance_ratio[0] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn full_basis_reconstructs() {
        let pts = Matrix::from_rows(&[
            vec![2.0, -1.0, 0.5],
            vec![0.3, 4.0, 1.0],
            vec![-1.2, 0.7, 2.2],
            vec![5.0, 1.5, -0.4],
        ]);
        let r = pca(&pts, 3).unwrap();
        let back = r.reconstruct();
        for (a, b) in back.as_slice().iter().zip(pts.as_slice()) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn invalid_component_counts() {
        let pts = Matrix::zeros(4, 2);
        assert!(pca(&pts, 0).is_err());
        assert!(pca(&pts, 3).is_err());
        assert!(pca(&Matrix::zeros(1, 2), 1).is_err());
    }

    #[test]
    fn orthonormal_and_sorted() {
        let pts = Matrix::from_rows(&[
            vec![1.0, 2.0, 3.0, 0.1],
            vec![2.0, 1.0, 0.0, 0.3],
            vec![0.5, 0.5, 4.0, -1.0],
            vec![3.0, 3.1, 1.0, 2.0],
            vec![-1.0, 0.0, 2.0, 0.7],
            vec![0.0, -2.0, 1.5, 1.1],
        ]);
        let r = pca(&pts, 4).unwrap();
        for w in r.explained_variance.windows(2) {
            assert!(w[0] >= w[1]);
        }
        assert!(r.explained_variance.iter().all(|&v| v >= 0.0));
        for a in 0..4 {
            for b in 0..4 {
                let dot: f64 = (0..4).map(|j| r.components.get(a, j) * r.components.get(b, j)).sum();
                let want = if a == b { 1.0 } else { 0.0 };
                assert!((dot - want).abs() < 1e-9, "{a} {b} {dot}");
            }
        }
    }
}
