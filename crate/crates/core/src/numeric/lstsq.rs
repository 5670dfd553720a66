//! Least squares through the normal equations, with a ridge fallback when
//! the Gram matrix is singular or badly conditioned.

use crate::matrix::Matrix;

/// Above this estimated condition number the ridge system is solved instead.
pub const CONDITION_LIMIT: f64 = 1e10;
/// Ridge strength relative to the mean diagonal of the Gram matrix.
pub const RIDGE_SCALE: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SolveError {
    #[error("least squares needs at least one row")]
    EmptyData,
    #[error("least squares needs at least one column")]
    NoColumns,
    #[error("design has {rows} rows but {targets} targets")]
    ShapeMismatch { rows: usize, targets: usize },
}

/// A design matrix whose first column is all ones, and the targets.
#[derive(Clone, Debug)]
pub struct LeastSquaresProblem {
    pub design: Matrix,
    pub targets: Vec<f64>,
}

impl LeastSquaresProblem {
    pub fn new(design: Matrix, targets: Vec<f64>) -> Self {
        Self { design, targets }
    }

    pub fn solve(&self) -> Result<Vec<f64>, SolveError> {
        solve_least_squares(&self.design, &self.targets)
    }
}

/// In-place Cholesky factorization of a symmetric positive definite matrix
/// stored row-major in `a` (lower triangle is overwritten with `L`).
/// Returns `false` on a non-positive pivot.
fn cholesky(a: &mut [f64], p: usize) -> bool {
    for j in 0..p {
        let mut d = a[j * p + j];
        for k in 0..j {
            d -= a[j * p + k] * a[j * p + k];
        }
        if d.is_nan() || d <= 0.0 || !d.is_finite() {
            return false;
        }
        let d = d.sqrt();
        a[j * p + j] = d;
        for i in j + 1..p {
            let mut s = a[i * p + j];
            for k in 0..j {
                s -= a[i * p + k] * a[j * p + k];
            }
            a[i * p + j] = s / d;
        }
    }
    true
}

fn cholesky_solve(l: &[f64], p: usize, b: &[f64]) -> Vec<f64> {
    let mut z = b.to_vec();
    for i in 0..p {
        let mut s = z[i];
        for k in 0..i {
            s -= l[i * p + k] * z[k];
        }
        z[i] = s / l[i * p + i];
    }
    for i in (0..p).rev() {
        let mut s = z[i];
        for k in i + 1..p {
            s -= l[k * p + i] * z[k];
        }
        z[i] = s / l[i * p + i];
    }
    z
}

/// Squared ratio of extreme Cholesky pivots; a cheap lower bound on the
/// condition number of the Gram matrix.
fn condition_estimate(l: &[f64], p: usize) -> f64 {
    let (lo, hi) = (0..p)
        .map(|i| l[i * p + i])
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), d| {
            (lo.min(d), hi.max(d))
        });
    (hi / lo).powi(2)
}

fn gram(design: &Matrix, targets: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let p = design.cols();
    let mut a = vec![0.0; p * p];
    let mut b = vec![0.0; p];
    for (row, &y) in design.iter_rows().zip(targets) {
        for i in 0..p {
            let ri = row[i];
            if ri == 0.0 {
                continue;
            }
            b[i] += ri * y;
            let line = &mut a[i * p..i * p + i + 1];
            for (aij, &rj) in line.iter_mut().zip(&row[..=i]) {
                *aij += ri * rj;
            }
        }
    }
    for i in 0..p {
        for j in i + 1..p {
            a[i * p + j] = a[j * p + i];
        }
    }
    (a, b)
}

/// Minimizes `|design . w - targets|^2`.
///
/// Solves the normal equations by Cholesky. When the Gram matrix is not
/// positive definite or its condition estimate exceeds [`CONDITION_LIMIT`],
/// solves `(DᵀD + λI) w = Dᵀy` with `λ = 1e-8 · trace / p`, growing `λ`
/// tenfold until the factorization succeeds. The result is always finite.
pub fn solve_least_squares(design: &Matrix, targets: &[f64]) -> Result<Vec<f64>, SolveError> {
    let (n, p) = (design.rows(), design.cols());
    if n == 0 {
        return Err(SolveError::EmptyData);
    }
    if p == 0 {
        return Err(SolveError::NoColumns);
    }
    if targets.len() != n {
        return Err(SolveError::ShapeMismatch {
            rows: n,
            targets: targets.len(),
        });
    }
    let (gram_matrix, rhs) = gram(design, targets);

    let mut l = gram_matrix.clone();
    if cholesky(&mut l, p) && condition_estimate(&l, p) <= CONDITION_LIMIT {
        let w = cholesky_solve(&l, p, &rhs);
        if w.iter().all(|v| v.is_finite()) {
            return Ok(w);
        }
    }

    let trace: f64 = (0..p).map(|i| gram_matrix[i * p + i]).sum();
    let mut lambda = RIDGE_SCALE * trace / p as f64;
    if lambda.is_nan() || lambda <= 0.0 || !lambda.is_finite() {
        lambda = RIDGE_SCALE;
    }
    for _ in 0..40 {
        let mut l = gram_matrix.clone();
        for i in 0..p {
            l[i * p + i] += lambda;
        }
        if cholesky(&mut l, p) {
            let w = cholesky_solve(&l, p, &rhs);
            if w.iter().all(|v| v.is_finite()) {
                return Ok(w);
            }
        }
        lambda *= 10.0;
    }
    // Only reachable with non-finite inputs: fall back to the mean.
    let mut w = vec![0.0; p];
    let mean = targets.iter().sum::<f64>() / n as f64;
    w[0] = if mean.is_finite() { mean } else { 0.0 };
    Ok(w)
}

/// Sum of squared residuals of `design . w` against `targets`.
pub fn residual_sum_squares(design: &Matrix, w: &[f64], targets: &[f64]) -> f64 {
    design
        .iter_rows()
        .zip(targets)
        .map(|(row, y)| {
            let r = row.iter().zip(w).map(|(a, b)| a * b).sum::<f64>() - y;
            r * r
        })
        .sum()
}
