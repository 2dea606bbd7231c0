//! Lawson–Hanson active-set solver for `min ‖Ax − b‖₂ subject to x ≥ 0`.

use nalgebra::{DMatrix, DVector};

use super::linalg::{lstsq, LinearSystem};
use crate::error::{Error, Result};

pub fn nnls(sys: &LinearSystem) -> Result<DVector<f64>> {
    let a = &sys.a;
    let b = &sys.b;
    let (m, n) = a.shape();
    let max_outer = 3 * n;
    let tol = 10.0 * f64::EPSILON * a.abs().column_sum().max() * m.max(n) as f64;

    let mut x = DVector::<f64>::zeros(n);
    let mut passive = vec![false; n];
    let mut w = a.transpose() * (b - a * &x);
    let mut outer = 0;

    loop {
        let candidate = (0..n)
            .filter(|&j| !passive[j] && w[j] > tol)
            .max_by(|&i, &j| w[i].total_cmp(&w[j]));
        let Some(j) = candidate else { break };
        outer += 1;
        if outer > max_outer {
            return Err(Error::NonConvergence { iterations: max_outer });
        }
        passive[j] = true;

        // inner loop: drop variables until the passive-set solution is feasible
        let mut inner = 0;
        loop {
            inner += 1;
            if inner > 3 * n + 1 {
                return Err(Error::NonConvergence { iterations: inner });
            }
            let idx: Vec<usize> = (0..n).filter(|&i| passive[i]).collect();
            let s_p = solve_on(a, b, &idx);
            if s_p.iter().all(|&v| v > tol) {
                x.fill(0.0);
                for (k, &i) in idx.iter().enumerate() {
                    x[i] = s_p[k];
                }
                break;
            }
            let mut step = f64::INFINITY;
            for (k, &i) in idx.iter().enumerate() {
                if s_p[k] <= tol {
                    let denom = x[i] - s_p[k];
                    if denom > 0.0 {
                        step = step.min(x[i] / denom);
                    } else {
                        step = 0.0;
                    }
                }
            }
            let step = if step.is_finite() { step } else { 0.0 };
            for (k, &i) in idx.iter().enumerate() {
                x[i] += step * (s_p[k] - x[i]);
            }
            for &i in &idx {
                if x[i] <= tol {
                    x[i] = 0.0;
                    passive[i] = false;
                }
            }
            if passive.iter().all(|p| !p) {
                break;
            }
        }
        w = a.transpose() * (b - a * &x);
    }
    Ok(x)
}

fn solve_on(a: &DMatrix<f64>, b: &DVector<f64>, idx: &[usize]) -> DVector<f64> {
    let sub = a.select_columns(idx);
    lstsq(&sub, b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn system(a: DMatrix<f64>, b: DVector<f64>) -> LinearSystem {
        LinearSystem::new(a, b).unwrap()
    }

    #[test]
    fn orthant_projection() {
        let s = system(DMatrix::identity(2, 2), DVector::from_vec(vec![1.0, -1.0]));
        assert_eq!(nnls(&s).unwrap(), DVector::from_vec(vec![1.0, 0.0]));
        let c = DVector::from_vec(vec![0.5, 0.0, 2.0]);
        let x = nnls(&system(DMatrix::identity(3, 3), c.clone())).unwrap();
        assert!((x - c).amax() < 1e-14);
    }

    /// Least squares on a column subset through the normal equations.
    fn normal_eq(a: &DMatrix<f64>, b: &DVector<f64>, cols: &[usize]) -> Option<DVector<f64>> {
        let sub = a.select_columns(cols);
        let g = sub.transpose() * &sub;
        Some(g.try_inverse()? * sub.transpose() * b)
    }

    /// Best objective over every support whose unconstrained solution is non-negative.
    fn enumerate(a: &DMatrix<f64>, b: &DVector<f64>) -> f64 {
        let n = a.ncols();
        let mut best = b.norm();
        for mask in 1u32..(1 << n) {
            let cols: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
            if let Some(sol) = normal_eq(a, b, &cols) {
                if sol.iter().all(|&v| v >= 0.0) {
                    best = best.min((a.select_columns(&cols) * sol - b).norm());
                }
            }
        }
        best
    }

    #[test]
    fn matches_exhaustive_enumeration() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2024);
        for _ in 0..50 {
            let a = DMatrix::from_fn(6, 4, |_, _| rng.random_range(-1.0..1.0));
            let b = DVector::from_fn(6, |_, _| rng.random_range(-1.0..1.0));
            let s = system(a.clone(), b.clone());
            let x = nnls(&s).unwrap();
            assert!(x.iter().all(|&v| v >= 0.0));
            assert!((s.residual_norm(&x) - enumerate(&a, &b)).abs() < 1e-8);
        }
    }

    #[test]
    fn kkt_conditions() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let a = DMatrix::from_fn(8, 5, |_, _| rng.random_range(-1.0..1.0));
            let b = DVector::from_fn(8, |_, _| rng.random_range(-2.0..2.0));
            let s = system(a.clone(), b.clone());
            let x = nnls(&s).unwrap();
            let grad = a.transpose() * (&b - &a * &x);
            for j in 0..5 {
                if x[j] > 0.0 {
                    assert!(grad[j].abs() < 1e-8);
                } else {
                    assert!(grad[j] <= 1e-8);
                }
            }
        }
    }

    #[test]
    fn rank_deficient_is_handled() {
        let a = DMatrix::from_row_slice(3, 3, &[1.0, 1.0, 0.0, 1.0, 1.0, 0.0, 0.0, 0.0, 1.0]);
        let b = DVector::from_vec(vec![1.0, 1.0, -1.0]);
        let x = nnls(&system(a.clone(), b.clone())).unwrap();
        assert!((x[0] + x[1] - 1.0).abs() < 1e-10);
        assert_eq!(x[2], 0.0);
    }
}
