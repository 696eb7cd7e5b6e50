//! Small dense helpers in the max-norm conventions used throughout.

use nalgebra::DMatrix;

use crate::{KamError, Result};

/// Largest absolute row sum (the operator norm induced by the max norm).
pub fn row_norm(m: &DMatrix<f64>) -> f64 {
    m.row_iter().map(|r| r.iter().map(|x| x.abs()).sum::<f64>()).fold(0.0, f64::max)
}

/// Largest absolute column sum, i.e. `row_norm` of the transpose.
pub fn col_norm(m: &DMatrix<f64>) -> f64 {
    m.column_iter().map(|c| c.iter().map(|x| x.abs()).sum::<f64>()).fold(0.0, f64::max)
}

/// `Omega_0 = [[0, -I], [I, 0]]` in dimension `2n`.
pub fn omega0(n: usize) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        m[(i, n + i)] = -1.0;
        m[(n + i, i)] = 1.0;
    }
    m
}

/// Inverse through LU with partial pivoting.
pub fn inverse(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if !m.is_square() {
        return Err(KamError::Shape(format!("inverse of a {:?} matrix", m.shape())));
    }
    m.clone().lu().try_inverse().ok_or(KamError::Singular)
}

/// Smallest and largest singular values.
pub fn singular_range(m: &DMatrix<f64>) -> (f64, f64) {
    let sv = m.clone().svd(false, false).singular_values;
    let hi = sv.iter().cloned().fold(0.0, f64::max);
    let lo = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    (lo, hi)
}

/// Spectral condition number.
pub fn condition(m: &DMatrix<f64>) -> f64 {
    let (lo, hi) = singular_range(m);
    if lo == 0.0 {
        f64::INFINITY
    } else {
        hi / lo
    }
}
