//! Stable-law parametrizations and characteristic functions.
//!
//! Two univariate parametrizations are supported. [`Parametrization::Zero`]
//! is the continuous form
//!
//! ```text
//! φ(t) = exp{ −(σ|t|)^α [1 + iβ sign(t) tan(πα/2) ((σ|t|)^{1−α} − 1)] + iδt }
//! ```
//!
//! and [`Parametrization::One`] the classical form
//!
//! ```text
//! φ(t) = exp{ −(σ|t|)^α [1 − iβ sign(t) tan(πα/2)] + iδ₁t }
//! ```
//!
//! (with the usual logarithmic terms at α = 1). The two describe the same law
//! when the locations are related by [`delta1_of`].

use std::f64::consts::{FRAC_2_PI, FRAC_PI_2};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::GridSpec;

/// Any `|α − 1|` below this selects the α = 1 formulas.
pub const ALPHA_ONE_TOL: f64 = 1e-9;

#[inline]
pub fn is_alpha_one(alpha: f64) -> bool {
    (alpha - 1.0).abs() < ALPHA_ONE_TOL
}

/// `tan(πα/2)`, snapped to exactly zero at the Gaussian endpoint.
#[inline]
pub(crate) fn tan_half_pi(alpha: f64) -> f64 {
    if alpha == 2.0 {
        0.0
    } else {
        (FRAC_PI_2 * alpha).tan()
    }
}

#[inline]
pub(crate) fn sign(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Parametrization {
    /// Continuous parametrization, jointly continuous in all parameters.
    #[default]
    Zero,
    /// Classical parametrization, discontinuous at α = 1.
    One,
}

/// Univariate stable parameters `(α, β, σ, δ)` with their parametrization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StableParams {
    pub alpha: f64,
    pub beta: f64,
    pub sigma: f64,
    pub delta: f64,
    #[serde(default)]
    pub param: Parametrization,
}

impl StableParams {
    pub fn new(alpha: f64, beta: f64, sigma: f64, delta: f64, param: Parametrization) -> Result<Self> {
        let p = Self {
            alpha,
            beta,
            sigma,
            delta,
            param,
        };
        p.validate()?;
        Ok(p)
    }

    /// Zero-parametrization shortcut.
    pub fn zero(alpha: f64, beta: f64, sigma: f64, delta: f64) -> Result<Self> {
        Self::new(alpha, beta, sigma, delta, Parametrization::Zero)
    }

    /// One-parametrization shortcut.
    pub fn one(alpha: f64, beta: f64, sigma: f64, delta: f64) -> Result<Self> {
        Self::new(alpha, beta, sigma, delta, Parametrization::One)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha <= 2.0) {
            return Err(Error::InvalidParams(format!("alpha = {} not in (0, 2]", self.alpha)));
        }
        if !(-1.0..=1.0).contains(&self.beta) {
            return Err(Error::InvalidParams(format!("beta = {} not in [-1, 1]", self.beta)));
        }
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(Error::InvalidParams(format!("sigma = {} must be positive", self.sigma)));
        }
        if !self.delta.is_finite() {
            return Err(Error::InvalidParams(format!("delta = {} must be finite", self.delta)));
        }
        Ok(())
    }

    /// Same law expressed in the One parametrization.
    pub fn to_one(&self) -> Self {
        match self.param {
            Parametrization::One => *self,
            Parametrization::Zero => Self {
                delta: delta1_of(self),
                param: Parametrization::One,
                ..*self
            },
        }
    }

    /// Same law expressed in the Zero parametrization.
    pub fn to_zero(&self) -> Self {
        match self.param {
            Parametrization::Zero => *self,
            Parametrization::One => Self {
                delta: self.delta + location_offset(self),
                param: Parametrization::Zero,
                ..*self
            },
        }
    }
}

/// `δ₀ − δ₁` for the law described by `(α, β, σ)`.
fn location_offset(p: &StableParams) -> f64 {
    if is_alpha_one(p.alpha) {
        p.beta * FRAC_2_PI * p.sigma * p.sigma.ln()
    } else {
        p.beta * p.sigma * tan_half_pi(p.alpha)
    }
}

/// One-parametrization location δ₁ for a Zero-parametrization location δ.
///
/// `δ₁ = δ − βσ tan(πα/2)` for α ≠ 1 and `δ₁ = δ − β(2/π)σ ln σ` for α = 1;
/// these are the values that make the two characteristic functions coincide.
pub fn delta1_of(params: &StableParams) -> f64 {
    params.delta - location_offset(params)
}

/// Univariate characteristic function in the parametrization carried by `params`.
pub fn charfn_uni(params: &StableParams, t: f64) -> Complex64 {
    log_charfn_uni(params, t).exp()
}

/// `ln φ(t)`, kept separate because the estimators regress on its parts.
pub fn log_charfn_uni(params: &StableParams, t: f64) -> Complex64 {
    let StableParams {
        alpha,
        beta,
        sigma,
        delta,
        param,
    } = *params;
    if t == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let st = sigma * t.abs();
    let sg = sign(t);
    let bracket = match (param, is_alpha_one(alpha)) {
        (Parametrization::Zero, false) => {
            Complex64::new(1.0, beta * sg * tan_half_pi(alpha) * (st.powf(1.0 - alpha) - 1.0))
        }
        (Parametrization::Zero, true) => Complex64::new(1.0, beta * FRAC_2_PI * sg * st.ln()),
        (Parametrization::One, false) => Complex64::new(1.0, -beta * sg * tan_half_pi(alpha)),
        (Parametrization::One, true) => Complex64::new(1.0, beta * FRAC_2_PI * sg * t.abs().ln()),
    };
    let scale = if is_alpha_one(alpha) { st } else { st.powf(alpha) };
    -scale * bracket + Complex64::new(0.0, delta * t)
}

/// Which form of the spectral kernel ψ_α to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PsiVariant {
    /// `|u|^α (1 − i sign(u) tan(πα/2))`.
    Standard,
    /// `|u|^α (1 + i sign(u) tan(πα/2)(|u|^{1−α} − 1))`.
    Continuous,
    /// Real-valued kernel for the two-point d = 1 grid.
    RealD1,
    /// `|u|^α`, used for d = 3.
    RealD3,
}

pub fn psi(u: f64, alpha: f64, variant: PsiVariant) -> Complex64 {
    if u == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let a = u.abs();
    let sg = sign(u);
    let one = is_alpha_one(alpha);
    match variant {
        PsiVariant::Standard if one => a * Complex64::new(1.0, FRAC_2_PI * sg * a.ln()),
        PsiVariant::Standard => a.powf(alpha) * Complex64::new(1.0, -sg * tan_half_pi(alpha)),
        PsiVariant::Continuous if one => a * Complex64::new(1.0, FRAC_2_PI * sg * a.ln()),
        PsiVariant::Continuous => {
            a.powf(alpha) * Complex64::new(1.0, sg * tan_half_pi(alpha) * (a.powf(1.0 - alpha) - 1.0))
        }
        PsiVariant::RealD1 if one => Complex64::new(a * (1.0 + FRAC_2_PI * sg * a.ln()), 0.0),
        PsiVariant::RealD1 => Complex64::new(a.powf(alpha) * (1.0 - sg * tan_half_pi(alpha)), 0.0),
        PsiVariant::RealD3 => Complex64::new(a.powf(alpha), 0.0),
    }
}

/// A d-dimensional stable law with a discrete spectral measure
/// `Γ = Σ γ_l δ_{s_l}` and shift vector δ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralModel {
    pub alpha: f64,
    pub points: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
    pub shift: Vec<f64>,
}

impl SpectralModel {
    pub fn new(alpha: f64, points: Vec<Vec<f64>>, weights: Vec<f64>, shift: Vec<f64>) -> Result<Self> {
        let model = Self {
            alpha,
            points,
            weights,
            shift,
        };
        model.validate()?;
        Ok(model)
    }

    /// Model whose point masses sit on the standard estimation grid for `(d, L)`.
    pub fn on_grid(alpha: f64, d: usize, weights: Vec<f64>, shift: Vec<f64>) -> Result<Self> {
        let grid = GridSpec::new(d, weights.len())?;
        Self::new(alpha, grid.points, weights, shift)
    }

    pub fn dim(&self) -> usize {
        self.shift.len()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha <= 2.0) {
            return Err(Error::InvalidParams(format!("alpha = {} not in (0, 2]", self.alpha)));
        }
        let d = self.shift.len();
        if d == 0 {
            return Err(Error::InvalidParams("dimension must be at least 1".into()));
        }
        if self.points.is_empty() {
            return Err(Error::InvalidParams("at least one point mass is required".into()));
        }
        if self.points.len() != self.weights.len() {
            return Err(Error::DimensionMismatch {
                expected: self.points.len(),
                got: self.weights.len(),
            });
        }
        for p in &self.points {
            if p.len() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    got: p.len(),
                });
            }
            let norm = p.iter().map(|x| x * x).sum::<f64>().sqrt();
            if (norm - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidParams(format!("point {p:?} is not a unit vector")));
            }
        }
        for (i, a) in self.points.iter().enumerate() {
            for b in &self.points[i + 1..] {
                let dist: f64 = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum();
                if dist.sqrt() < 1e-12 {
                    return Err(Error::InvalidParams(format!("duplicate point {a:?}")));
                }
            }
        }
        if self.weights.iter().any(|w| !(*w >= 0.0 && w.is_finite())) {
            return Err(Error::InvalidParams("weights must be finite and non-negative".into()));
        }
        if self.shift.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidParams("shift must be finite".into()));
        }
        Ok(())
    }

    /// Exponent `Σ_l ψ_α(⟨t, s_l⟩) γ_l` of the centred law (standard ψ).
    pub fn spectral_exponent(&self, t: &[f64]) -> Result<Complex64> {
        if t.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: t.len(),
            });
        }
        Ok(self
            .points
            .iter()
            .zip(&self.weights)
            .map(|(s, &g)| psi(dot(t, s), self.alpha, PsiVariant::Standard) * g)
            .sum())
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Multivariate characteristic function `exp(−Σ ψ_α(⟨t,s_l⟩)γ_l + i⟨δ,t⟩)`.
///
/// The shift enters with a plus sign so that this is the characteristic
/// function of `δ + Σ γ_l^{1/α} Z_l s_l`, the vector drawn by
/// [`crate::simulate::sample_mv`].
pub fn charfn_mv(model: &SpectralModel, t: &[f64]) -> Result<Complex64> {
    let exponent = model.spectral_exponent(t)?;
    Ok((-exponent + Complex64::new(0.0, dot(&model.shift, t))).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{E, PI};

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn gaussian_and_cauchy_cf() {
        let g = StableParams::one(2.0, 0.0, 1.0, 0.0).unwrap();
        assert!(close(charfn_uni(&g, 1.0), Complex64::new((-1.0f64).exp(), 0.0), 1e-15));
        let c = StableParams::one(1.0, 0.0, 1.0, 0.0).unwrap();
        assert!(close(charfn_uni(&c, 2.0), Complex64::new((-2.0f64).exp(), 0.0), 1e-15));
    }

    #[test]
    fn zero_param_matches_high_precision_evaluation() {
        // mpmath, 40 digits
        let p = StableParams::zero(1.5, 0.5, 2.0, 1.0).unwrap();
        let v = charfn_uni(&p, 0.7);
        assert!(close(v, Complex64::new(0.16045875911827017277, 0.10324536640071491961), 1e-14));
        // the same law written in the One parametrization
        let v1 = charfn_uni(&p.to_one(), 0.7);
        assert!(close(v, v1, 1e-14));
    }

    #[test]
    fn cf_at_origin_is_one() {
        for param in [Parametrization::Zero, Parametrization::One] {
            let p = StableParams::new(0.7, -0.3, 2.0, 5.0, param).unwrap();
            assert_eq!(charfn_uni(&p, 0.0), Complex64::new(1.0, 0.0));
        }
    }

    #[test]
    fn delta1_examples() {
        let p = StableParams::zero(1.5, 0.0, 3.0, 4.0).unwrap();
        assert_eq!(delta1_of(&p), 4.0);
        // tan(3π/4) = −1
        let p = StableParams::zero(1.5, 1.0, 1.0, 0.0).unwrap();
        assert!((delta1_of(&p) - 1.0).abs() < 1e-12);
        let p = StableParams::zero(1.0, 1.0, E, 0.0).unwrap();
        assert!((delta1_of(&p) + 2.0 * E / PI).abs() < 1e-12);
    }

    #[test]
    fn parametrizations_describe_the_same_law() {
        for &alpha in &[0.5, 1.0 - 1e-6, 1.0, 1.5, 2.0] {
            for &beta in &[-1.0, 0.0, 1.0] {
                let p = StableParams::zero(alpha, beta, 1.7, -0.4).unwrap();
                let q = p.to_one();
                for &t in &[-3.0, -0.2, 0.4, 1.0, 2.5] {
                    assert!(close(charfn_uni(&p, t), charfn_uni(&q, t), 1e-9), "{alpha} {beta} {t}");
                }
                // relative to the size of the location shift, which is ~6e5 at α = 1 − 1e-6
                let tol = 1e-12 * q.delta.abs().max(1.0);
                assert!((q.to_zero().delta - p.delta).abs() <= tol);
            }
        }
    }

    #[test]
    fn psi_examples() {
        for v in [PsiVariant::Standard, PsiVariant::Continuous, PsiVariant::RealD1, PsiVariant::RealD3] {
            assert_eq!(psi(0.0, 1.3, v), Complex64::new(0.0, 0.0));
        }
        assert_eq!(psi(-2.0, 1.0, PsiVariant::RealD3), Complex64::new(2.0, 0.0));
        assert_eq!(psi(1.0, 2.0, PsiVariant::Standard), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn real_d1_symmetry() {
        for &alpha in &[0.4, 0.9, 1.3, 1.8] {
            for &u in &[0.1, 0.5, 1.0, 3.0] {
                let s = psi(u, alpha, PsiVariant::RealD1).re + psi(-u, alpha, PsiVariant::RealD1).re;
                assert!((s - 2.0 * u.powf(alpha)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn multivariate_cf_examples() {
        let m = SpectralModel::new(2.0, vec![vec![-1.0], vec![1.0]], vec![0.5, 0.5], vec![0.0]).unwrap();
        let v = charfn_mv(&m, &[1.5]).unwrap();
        assert!(close(v, Complex64::new((-2.25f64).exp(), 0.0), 1e-14));
        assert_eq!(charfn_mv(&m, &[0.0]).unwrap(), Complex64::new(1.0, 0.0));
        assert!(matches!(charfn_mv(&m, &[1.0, 2.0]), Err(Error::DimensionMismatch { .. })));

        // term-by-term summation in mpmath
        let m = SpectralModel::on_grid(1.3, 2, vec![0.25; 4], vec![0.0, 0.0]).unwrap();
        let v = charfn_mv(&m, &[1.0, 0.0]).unwrap();
        assert!(close(v, Complex64::new(0.6065306597126334236, 0.0), 1e-14));
        let v = charfn_mv(&m, &[0.6, -1.1]).unwrap();
        assert!(close(v, Complex64::new(0.43896819037495422364, 0.0), 1e-14));
    }

    #[test]
    fn model_validation() {
        assert!(SpectralModel::new(1.5, vec![vec![0.5, 0.5]], vec![1.0], vec![0.0, 0.0]).is_err());
        assert!(SpectralModel::new(1.5, vec![vec![1.0], vec![1.0]], vec![1.0, 1.0], vec![0.0]).is_err());
        assert!(SpectralModel::new(1.5, vec![vec![1.0]], vec![-1.0], vec![0.0]).is_err());
        assert!(StableParams::zero(2.1, 0.0, 1.0, 0.0).is_err());
        assert!(StableParams::zero(1.0, 1.5, 1.0, 0.0).is_err());
        assert!(StableParams::zero(1.0, 0.0, 0.0, 0.0).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn params() -> impl Strategy<Value = StableParams> {
            (0.1f64..=2.0, -1.0f64..=1.0, 0.05f64..5.0, -5.0f64..5.0, any::<bool>()).prop_map(
                |(a, b, s, d, one)| {
                    let param = if one { Parametrization::One } else { Parametrization::Zero };
                    StableParams::new(a, b, s, d, param).unwrap()
                },
            )
        }

        proptest! {
            #[test]
            fn hermitian_and_bounded(p in params(), t in -20.0f64..20.0) {
                let a = charfn_uni(&p, t);
                let b = charfn_uni(&p, -t);
                prop_assert!((a - b.conj()).norm() < 1e-12);
                prop_assert!(a.norm() <= 1.0 + 1e-15);
            }

            #[test]
            fn gaussian_is_real_modulus(s in 0.1f64..3.0, d in -3.0f64..3.0, b in -1.0f64..1.0, t in -5.0f64..5.0) {
                let p = StableParams::zero(2.0, b, s, d).unwrap();
                let v = charfn_uni(&p, t);
                prop_assert!((v.norm() - (-(s * t).powi(2)).exp()).abs() < 1e-14);
                prop_assert!((v - Complex64::new(0.0, d * t).exp() * v.norm()).norm() < 1e-14);
            }

            #[test]
            fn mv_cf_bounded(t0 in -4.0f64..4.0, t1 in -4.0f64..4.0, alpha in 0.3f64..2.0) {
                let m = SpectralModel::on_grid(alpha, 2, vec![0.1, 0.4, 0.2, 0.3, 0.5], vec![0.3, -0.2]).unwrap();
                prop_assert!(charfn_mv(&m, &[t0, t1]).unwrap().norm() <= 1.0 + 1e-15);
            }
        }
    }
}
