//! ECF estimation of a discrete spectral measure for d = 1, 2, 3.
//!
//! With `I(t) = −ln φ(t) = Σ_l ψ_α(⟨t, s_l⟩) γ_l` for a centred strictly
//! stable vector, evaluating `I` at L frequencies gives a linear system
//! `I = ψγ`. The empirical `Î` replaces `I` and the system is solved in a
//! form adapted to each dimension.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{condition_number, condition_number_complex, nnls, LinearSystem};
use crate::simulate::MultiSample;
use crate::stable::{dot, psi, Parametrization, PsiVariant};
use crate::univariate::{hybrid_fit, UniFitReport};

/// Direct solves are refused above this condition number.
pub const MAX_CONDITION: f64 = 1e12;

/// Point masses `s_l` and frequencies `t_l` used by the estimator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub d: usize,
    #[serde(rename = "L")]
    pub l: usize,
    pub points: Vec<Vec<f64>>,
    pub freqs: Vec<Vec<f64>>,
}

impl GridSpec {
    /// Standard grid: `s = ∓1, t = ±1` for d = 1; equally spaced angles on
    /// the circle for d = 2; for d = 3 the polar angle of the l-th point is
    /// `π/l` and its azimuth `2π(l−1)/L`. Frequencies equal points for d ≥ 2.
    pub fn new(d: usize, l: usize) -> Result<Self> {
        if l == 0 {
            return Err(Error::InvalidParams("L must be at least 1".into()));
        }
        let (points, freqs) = match d {
            1 => {
                if l != 2 {
                    return Err(Error::InvalidParams(format!("d = 1 supports only L = 2, got {l}")));
                }
                (vec![vec![-1.0], vec![1.0]], vec![vec![1.0], vec![-1.0]])
            }
            2 => {
                let pts: Vec<Vec<f64>> = (0..l)
                    .map(|k| {
                        let (s, c) = (2.0 * PI * k as f64 / l as f64).sin_cos();
                        vec![c, s]
                    })
                    .collect();
                (pts.clone(), pts)
            }
            3 => {
                let pts: Vec<Vec<f64>> = (1..=l)
                    .map(|k| {
                        let (sp, cp) = (PI / k as f64).sin_cos();
                        let (sa, ca) = (2.0 * PI * (k - 1) as f64 / l as f64).sin_cos();
                        vec![sp * ca, sp * sa, cp]
                    })
                    .collect();
                (pts.clone(), pts)
            }
            _ => return Err(Error::InvalidParams(format!("dimension {d} not in {{1, 2, 3}}"))),
        };
        Ok(Self { d, l, points, freqs })
    }

    /// Kernel variant matching the dimension.
    pub fn variant(&self) -> PsiVariant {
        match self.d {
            1 => PsiVariant::RealD1,
            3 => PsiVariant::RealD3,
            _ => PsiVariant::Standard,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SpectralMethod {
    D1Real,
    D2EvenNNLS,
    D2OddAbsRe,
    D3Real,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralFit {
    pub alpha_hat: f64,
    pub delta_hat: Vec<f64>,
    pub gamma_hat: Vec<f64>,
    pub grid: GridSpec,
    pub method: SpectralMethod,
}

/// Joint index and shift from per-coordinate hybrid fits: α̂ is the mean of
/// the marginal indices, δ̂ the vector of marginal (Zero-form) locations.
pub fn marginal_joint_fit(data: &MultiSample) -> Result<(f64, Vec<f64>, Vec<UniFitReport>)> {
    let marginals = (0..data.d())
        .map(|j| hybrid_fit(&data.column(j)))
        .collect::<Result<Vec<_>>>()?;
    let alpha = marginals.iter().map(|m| m.estimate.alpha).sum::<f64>() / marginals.len() as f64;
    let delta = marginals.iter().map(|m| m.estimate.delta).collect();
    Ok((alpha, delta, marginals))
}

/// `Î(t) = −Log φ̂(t)` (principal branch) at each frequency.
pub fn empirical_i(data: &MultiSample, freqs: &[Vec<f64>]) -> Result<Vec<Complex64>> {
    let n = data.n() as f64;
    freqs
        .iter()
        .enumerate()
        .map(|(index, t)| {
            if t.len() != data.d() {
                return Err(Error::DimensionMismatch {
                    expected: data.d(),
                    got: t.len(),
                });
            }
            let (c, s) = data.rows().fold((0.0, 0.0), |(c, s), x| {
                let (sn, cs) = dot(t, x).sin_cos();
                (c + cs, s + sn)
            });
            let phi = Complex64::new(c / n, s / n);
            if phi.norm() <= f64::EPSILON {
                return Err(Error::EcfVanishes { index });
            }
            Ok(-phi.ln())
        })
        .collect()
}

/// `L×L` matrix with entries `ψ_α(⟨t_k, s_l⟩)`.
pub fn psi_matrix(alpha: f64, grid: &GridSpec, variant: PsiVariant) -> DMatrix<Complex64> {
    DMatrix::from_fn(grid.l, grid.l, |k, l| psi(dot(&grid.freqs[k], &grid.points[l]), alpha, variant))
}

fn real_part(m: &DMatrix<Complex64>) -> DMatrix<f64> {
    m.map(|z| z.re)
}

fn solve_real(a: DMatrix<f64>, b: DVector<f64>) -> Result<DVector<f64>> {
    let condition = condition_number(&a);
    if !(condition <= MAX_CONDITION) {
        return Err(Error::SingularSystem { condition });
    }
    a.lu().solve(&b).ok_or(Error::SingularSystem {
        condition: f64::INFINITY,
    })
}

/// γ̂ from values of `I` at the grid frequencies (empirical or exact).
pub fn gamma_from_i(i_vals: &[Complex64], alpha: f64, grid: &GridSpec) -> Result<(Vec<f64>, SpectralMethod)> {
    if i_vals.len() != grid.l {
        return Err(Error::DimensionMismatch {
            expected: grid.l,
            got: i_vals.len(),
        });
    }
    let clamp = |v: DVector<f64>| v.iter().map(|&g| g.max(0.0)).collect::<Vec<_>>();
    match grid.d {
        1 => {
            let a = real_part(&psi_matrix(alpha, grid, PsiVariant::RealD1));
            let b = DVector::from_iterator(2, i_vals.iter().map(|z| z.re + z.im));
            Ok((clamp(solve_real(a, b)?), SpectralMethod::D1Real))
        }
        2 if grid.l % 2 == 0 => {
            let m = grid.l / 2;
            let psi = psi_matrix(alpha, grid, PsiVariant::Standard);
            let mut a = DMatrix::<f64>::zeros(grid.l, grid.l);
            let mut c = DVector::<f64>::zeros(grid.l);
            for k in 0..m {
                // t_{k+m} = −t_k, so I_{k+m} = conj(I_k) in expectation
                let plus = (i_vals[k] + i_vals[k + m]) / 2.0;
                let minus = (i_vals[k] - i_vals[k + m]) / 2.0;
                c[k] = plus.re;
                c[m + k] = -minus.im;
                for l in 0..grid.l {
                    a[(k, l)] = psi[(k, l)].re;
                    a[(m + k, l)] = psi[(m + k, l)].im;
                }
            }
            let gamma = nnls(&LinearSystem::new(a, c)?)?;
            Ok((gamma.iter().copied().collect(), SpectralMethod::D2EvenNNLS))
        }
        2 => {
            let psi = psi_matrix(alpha, grid, PsiVariant::Standard);
            let condition = condition_number_complex(&psi);
            if !(condition <= MAX_CONDITION) {
                return Err(Error::SingularSystem { condition });
            }
            let b = DVector::from_column_slice(i_vals);
            let sol = psi.lu().solve(&b).ok_or(Error::SingularSystem {
                condition: f64::INFINITY,
            })?;
            Ok((sol.iter().map(|z| z.re.abs()).collect(), SpectralMethod::D2OddAbsRe))
        }
        3 => {
            let a = real_part(&psi_matrix(alpha, grid, PsiVariant::RealD3));
            let b = DVector::from_iterator(grid.l, i_vals.iter().map(|z| z.re));
            Ok((clamp(solve_real(a, b)?), SpectralMethod::D3Real))
        }
        d => Err(Error::InvalidParams(format!("dimension {d} not in {{1, 2, 3}}"))),
    }
}

/// γ̂ for data already centred at the shift.
pub fn estimate_gamma(data: &MultiSample, alpha: f64, grid: &GridSpec) -> Result<SpectralFit> {
    if data.d() != grid.d {
        return Err(Error::DimensionMismatch {
            expected: grid.d,
            got: data.d(),
        });
    }
    let i_vals = empirical_i(data, &grid.freqs)?;
    let (gamma_hat, method) = gamma_from_i(&i_vals, alpha, grid)?;
    Ok(SpectralFit {
        alpha_hat: alpha,
        delta_hat: vec![0.0; grid.d],
        gamma_hat,
        grid: grid.clone(),
        method,
    })
}

/// Full pipeline: marginal fits, centring, then γ̂ on the standard grid.
/// Centres on the Zero-form marginal locations; see [`fit_spectral_with`].
pub fn fit_spectral(data: &MultiSample, l: usize) -> Result<SpectralFit> {
    fit_spectral_with(data, l, Parametrization::Zero)
}

/// [`fit_spectral`] with a choice of marginal location used for centring.
///
/// The shift of a strictly stable vector is the One-form location of each
/// marginal. The Zero-form location differs from it by `βσ tan(πα/2)` when a
/// marginal is skewed, but does not depend on β̂ and so has a much smaller
/// variance. `Zero` trades that bias for precision; `One` is unbiased.
pub fn fit_spectral_with(data: &MultiSample, l: usize, centring: Parametrization) -> Result<SpectralFit> {
    if !(1..=3).contains(&data.d()) {
        return Err(Error::InvalidParams(format!("dimension {} not in {{1, 2, 3}}", data.d())));
    }
    if l < 2 {
        return Err(Error::InvalidParams(format!("L must be at least 2, got {l}")));
    }
    let grid = GridSpec::new(data.d(), l)?;
    let (alpha, _, marginals) = marginal_joint_fit(data)?;
    let delta: Vec<f64> = marginals
        .iter()
        .map(|m| match centring {
            Parametrization::Zero => m.estimate.delta,
            Parametrization::One => m.estimate.to_one().delta,
        })
        .collect();
    let centred = data.centered(&delta)?;
    let fit = estimate_gamma(&centred, alpha, &grid)?;
    Ok(SpectralFit {
        delta_hat: delta,
        ..fit
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simulate::{sample_mv, RngSeed};
    use crate::stable::SpectralModel;

    fn exact_i(model: &SpectralModel, grid: &GridSpec) -> Vec<Complex64> {
        grid.freqs
            .iter()
            .map(|t| model.spectral_exponent(t).unwrap())
            .collect()
    }

    fn check_oracle(d: usize, l: usize, alpha: f64, gamma: Vec<f64>) {
        let grid = GridSpec::new(d, l).unwrap();
        let model = SpectralModel::on_grid(alpha, d, gamma.clone(), vec![0.0; d]).unwrap();
        let (g, _) = gamma_from_i(&exact_i(&model, &grid), alpha, &grid).unwrap();
        for (a, b) in g.iter().zip(&gamma) {
            assert!((a - b).abs() < 1e-8, "d={d} L={l} α={alpha}: {g:?} vs {gamma:?}");
        }
    }

    #[test]
    fn exact_i_recovers_gamma() {
        check_oracle(1, 2, 1.6, vec![0.5, 0.5]);
        check_oracle(1, 2, 1.6, vec![0.3, 0.9]);
        check_oracle(2, 4, 1.3, vec![0.25; 4]);
        check_oracle(2, 4, 1.3, vec![0.1, 0.4, 0.0, 0.7]);
        check_oracle(2, 6, 0.8, vec![0.2, 0.1, 0.3, 0.05, 0.2, 0.15]);
        check_oracle(2, 5, 1.5, vec![0.2; 5]);
        check_oracle(2, 3, 1.1, vec![0.2, 0.5, 0.3]);
        check_oracle(3, 3, 1.7, vec![1.0 / 3.0; 3]);
        check_oracle(3, 4, 1.8, vec![0.25; 4]);
        check_oracle(3, 4, 1.2, vec![0.1, 0.6, 0.2, 0.4]);
    }

    #[test]
    fn grids_are_unit_and_distinct() {
        for &(d, l) in &[(1, 2), (2, 3), (2, 4), (2, 7), (3, 3), (3, 4), (3, 6)] {
            let g = GridSpec::new(d, l).unwrap();
            assert_eq!(g.points.len(), l);
            assert_eq!(g.freqs.len(), l);
            SpectralModel::new(1.5, g.points.clone(), vec![1.0; l], vec![0.0; d]).unwrap();
        }
        let g = GridSpec::new(1, 2).unwrap();
        assert_eq!(g.points, vec![vec![-1.0], vec![1.0]]);
        assert_eq!(g.freqs, vec![vec![1.0], vec![-1.0]]);
    }

    #[test]
    fn even_grids_pair_opposite_frequencies() {
        let g = GridSpec::new(2, 6).unwrap();
        for k in 0..3 {
            for j in 0..2 {
                assert!((g.freqs[k][j] + g.freqs[k + 3][j]).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn even_l_bookkeeping_inverts() {
        // (Re I_k, −Im of the half difference) determine both I_k and I_{k+m}
        let g = GridSpec::new(2, 4).unwrap();
        let model = SpectralModel::on_grid(1.3, 2, vec![0.1, 0.4, 0.2, 0.7], vec![0.0; 2]).unwrap();
        let i = exact_i(&model, &g);
        for k in 0..2 {
            let re = ((i[k] + i[k + 2]) / 2.0).re;
            let im = -((i[k] - i[k + 2]) / 2.0).im;
            assert!((Complex64::new(re, -im) - i[k]).norm() < 1e-14);
            assert!((Complex64::new(re, im) - i[k + 2]).norm() < 1e-14);
        }
    }

    #[test]
    fn psi_matrix_examples() {
        let g = GridSpec::new(2, 4).unwrap();
        let m = psi_matrix(2.0, &g, PsiVariant::Standard);
        assert!((m[(0, 0)] - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        let g3 = GridSpec::new(3, 4).unwrap();
        let m3 = psi_matrix(1.7, &g3, PsiVariant::RealD3);
        for k in 0..4 {
            assert!((m3[(k, k)].re - 1.0).abs() < 1e-12);
            for l in 0..4 {
                assert_eq!(m3[(k, l)].im, 0.0);
            }
        }
        // hand evaluation at u = ±1, α = 1.6
        let m1 = psi_matrix(1.6, &GridSpec::new(1, 2).unwrap(), PsiVariant::RealD1);
        let lo = 0.2734574719946391141;
        let hi = 1.7265425280053608859;
        assert!((m1[(0, 0)].re - lo).abs() < 1e-14);
        assert!((m1[(0, 1)].re - hi).abs() < 1e-14);
        assert!((m1[(1, 0)].re - hi).abs() < 1e-14);
        assert!((m1[(1, 1)].re - lo).abs() < 1e-14);
    }

    #[test]
    fn empirical_i_of_zeros() {
        let data = MultiSample::new(vec![0.0; 20], 10, 2).unwrap();
        let g = GridSpec::new(2, 4).unwrap();
        assert!(empirical_i(&data, &g.freqs).unwrap().iter().all(|z| z.norm() == 0.0));
        let one = MultiSample::new(vec![0.0; 3], 1, 3).unwrap();
        let g = GridSpec::new(3, 3).unwrap();
        assert!(empirical_i(&one, &g.freqs).unwrap().iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn empirical_i_vanishing_ecf() {
        let data = MultiSample::new(vec![PI / 2.0, -PI / 2.0], 2, 1).unwrap();
        assert!(matches!(
            empirical_i(&data, &[vec![1.0]]),
            Err(Error::EcfVanishes { index: 0 })
        ));
    }

    #[test]
    fn empirical_i_matches_model() {
        let model = SpectralModel::on_grid(1.3, 2, vec![0.25; 4], vec![0.0; 2]).unwrap();
        let data = sample_mv(&model, 100_000, RngSeed(5)).unwrap();
        let g = GridSpec::new(2, 4).unwrap();
        let emp = empirical_i(&data, &g.freqs).unwrap();
        for (e, x) in emp.iter().zip(exact_i(&model, &g)) {
            assert!((e.re - x.re).abs() < 0.05 && (e.im - x.im).abs() < 0.05);
        }
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(GridSpec::new(1, 3).is_err());
        assert!(GridSpec::new(4, 3).is_err());
        let data = MultiSample::new(vec![0.5; 60], 30, 2).unwrap();
        assert!(fit_spectral(&data, 1).is_err());
    }

    #[test]
    fn identical_columns_share_alpha() {
        let model = SpectralModel::on_grid(1.5, 1, vec![0.5, 0.5], vec![0.0]).unwrap();
        let x = sample_mv(&model, 2000, RngSeed(3)).unwrap().column(0);
        let rows: Vec<Vec<f64>> = x.iter().map(|&v| vec![v, v]).collect();
        let data = MultiSample::from_rows(&rows).unwrap();
        let (alpha, delta, _) = marginal_joint_fit(&data).unwrap();
        let uni = hybrid_fit(&x).unwrap().estimate;
        assert!((alpha - uni.alpha).abs() < 1e-15);
        assert_eq!(delta, vec![uni.delta, uni.delta]);
    }

    #[test]
    fn pipeline_on_shifted_data() {
        let model = SpectralModel::on_grid(1.5, 2, vec![0.2; 5], vec![2.0, -1.0]).unwrap();
        let data = sample_mv(&model, 5000, RngSeed(17)).unwrap();
        let fit = fit_spectral(&data, 5).unwrap();
        assert_eq!(fit.method, SpectralMethod::D2OddAbsRe);
        assert!((fit.alpha_hat - 1.5).abs() < 0.1);
        assert!((fit.delta_hat[0] - 2.0).abs() < 0.15 && (fit.delta_hat[1] + 1.0).abs() < 0.15);
        for g in &fit.gamma_hat {
            assert!((g - 0.2).abs() < 0.08, "{:?}", fit.gamma_hat);
        }
    }

    #[test]
    fn centring_conventions() {
        // skewed marginals: the first coordinate only sees s_3 = (−√3/2, 0, 1/2)
        let model = SpectralModel::on_grid(1.8, 3, vec![0.25; 4], vec![0.0; 3]).unwrap();
        let data = sample_mv(&model, 20_000, RngSeed(21)).unwrap();
        let zero = fit_spectral(&data, 4).unwrap();
        let one = fit_spectral_with(&data, 4, Parametrization::One).unwrap();
        // Zero-form offset βσ tan(πα/2) with β = −1, σ = (√3/2)·0.25^{1/1.8}
        let sigma = 0.75f64.sqrt() * 0.25f64.powf(1.0 / 1.8);
        let offset = -sigma * (0.9 * PI).tan();
        assert!((zero.delta_hat[0] - offset).abs() < 0.05, "{:?}", zero.delta_hat);
        assert!(one.delta_hat[0].abs() < 0.05, "{:?}", one.delta_hat);
        // d = 3 uses only |φ̂|, which does not see the shift
        for (a, b) in zero.gamma_hat.iter().zip(&one.gamma_hat) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn oracle_recovery_random_weights(
                alpha in 0.6f64..1.95,
                w in proptest::collection::vec(0.0f64..1.0, 4),
            ) {
                prop_assume!((alpha - 1.0).abs() > 0.05);
                let grid = GridSpec::new(2, 4).unwrap();
                let model = SpectralModel::on_grid(alpha, 2, w.clone(), vec![0.0; 2]).unwrap();
                let (g, _) = gamma_from_i(&exact_i(&model, &grid), alpha, &grid).unwrap();
                for (a, b) in g.iter().zip(&w) {
                    prop_assert!((a - b).abs() < 1e-8);
                }
            }

            #[test]
            fn gamma_is_nonnegative(seed in 0u64..200, l in 3usize..7) {
                let model = SpectralModel::on_grid(1.5, 2, vec![1.0 / l as f64; l], vec![0.0; 2]).unwrap();
                let data = sample_mv(&model, 200, RngSeed(seed)).unwrap();
                let grid = GridSpec::new(2, l).unwrap();
                if let Ok(fit) = estimate_gamma(&data, 1.5, &grid) {
                    prop_assert!(fit.gamma_hat.iter().all(|&g| g >= 0.0));
                    prop_assert_eq!(fit.gamma_hat.len(), l);
                }
            }
        }
    }
}
