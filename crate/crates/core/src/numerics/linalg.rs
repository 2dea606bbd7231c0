use faer::{c64, Mat};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Simple linear regression `y ≈ slope·x + intercept`.
pub fn ols(x: &[f64], y: &[f64]) -> Result<(f64, f64)> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            got: y.len(),
        });
    }
    if x.len() < 2 {
        return Err(Error::InsufficientPoints { usable: x.len() });
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (sxx, sxy) = x.iter().zip(y).fold((0.0, 0.0), |(sxx, sxy), (&a, &b)| {
        (sxx + (a - mx) * (a - mx), sxy + (a - mx) * (b - my))
    });
    let scale = x.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
    if sxx <= (scale * f64::EPSILON).powi(2) * n {
        return Err(Error::CollinearInput);
    }
    let slope = sxy / sxx;
    Ok((slope, my - slope * mx))
}

/// Dense real system `A x ≈ b`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearSystem {
    pub a: DMatrix<f64>,
    pub b: DVector<f64>,
}

impl LinearSystem {
    pub fn new(a: DMatrix<f64>, b: DVector<f64>) -> Result<Self> {
        if a.nrows() == 0 || a.ncols() == 0 {
            return Err(Error::EmptyInput);
        }
        if a.nrows() != b.len() {
            return Err(Error::DimensionMismatch {
                expected: a.nrows(),
                got: b.len(),
            });
        }
        if a.iter().chain(b.iter()).any(|v| !v.is_finite()) {
            return Err(Error::InvalidParams("system entries must be finite".into()));
        }
        Ok(Self { a, b })
    }

    pub fn residual_norm(&self, x: &DVector<f64>) -> f64 {
        (&self.a * x - &self.b).norm()
    }
}

// nalgebra 0.35's SVD returns wrong factors on some small block-structured
// matrices (reconstruction error ~1e-1), so the SVD work goes through faer.
fn to_faer(a: &DMatrix<f64>) -> Mat<f64> {
    Mat::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)])
}

/// Minimum-norm least-squares solution via SVD.
///
/// Singular values below `max(m, n)·ε·σ_max` are treated as zero. Returns
/// NaNs if the decomposition fails, which only happens for non-finite input.
pub fn lstsq(a: &DMatrix<f64>, b: &DVector<f64>) -> DVector<f64> {
    let (m, n) = a.shape();
    let Ok(svd) = to_faer(a).thin_svd() else {
        return DVector::from_element(n, f64::NAN);
    };
    let (u, s, v) = (svd.U(), svd.S().column_vector(), svd.V());
    let smax = (0..s.nrows()).fold(0.0f64, |acc, k| acc.max(s[k]));
    let cutoff = smax * f64::EPSILON * m.max(n) as f64;
    let mut x = DVector::zeros(n);
    for k in 0..s.nrows() {
        if s[k] > cutoff {
            let coef = (0..m).map(|i| u[(i, k)] * b[i]).sum::<f64>() / s[k];
            for j in 0..n {
                x[j] += coef * v[(j, k)];
            }
        }
    }
    x
}

fn extremes(s: &[f64]) -> (f64, f64) {
    s.iter().fold((0.0f64, f64::INFINITY), |(hi, lo), &v| (hi.max(v), lo.min(v)))
}

/// 2-norm condition number; infinite for rank-deficient matrices.
pub fn condition_number(a: &DMatrix<f64>) -> f64 {
    match to_faer(a).singular_values() {
        Ok(s) => {
            let (hi, lo) = extremes(&s);
            ratio(hi, lo)
        }
        Err(_) => f64::INFINITY,
    }
}

pub fn condition_number_complex(a: &DMatrix<Complex64>) -> f64 {
    let m = Mat::<c64>::from_fn(a.nrows(), a.ncols(), |i, j| c64::new(a[(i, j)].re, a[(i, j)].im));
    match m.singular_values() {
        Ok(s) => {
            let (hi, lo) = extremes(&s);
            ratio(hi, lo)
        }
        Err(_) => f64::INFINITY,
    }
}

fn ratio(max: f64, min: f64) -> f64 {
    if min > 0.0 {
        max / min
    } else {
        f64::INFINITY
    }
}
