//! Univariate estimation from the empirical characteristic function.
//!
//! [`hybrid_fit`] runs four steps:
//!
//! 1. Kogon–Williams regressions give initial `(α̂₀, β̂₀, σ̂₀, δ̂₀)` and the
//!    sample is normalized to `x′ = (x − δ̂₀)/σ̂₀`.
//! 2. On `t_k = πk/25, k = 1..K`, OLS of `ln(−ln|φ̂(t_k)|²)` on `ln t_k` gives
//!    `(α̂₁, σ̂₁)`. `K` comes from curves fitted to Koutrouvelis' table,
//!    interpolated in the sample size (see [`select_k`]).
//! 3. The ECF phase at two fixed frequencies gives the location `δ̂₁` of the
//!    normalized sample ([`press_delta`]).
//! 4. `α̂ = α̂₁`, `σ̂ = σ̂₀σ̂₁`, `δ̂ = σ̂₀δ̂₁ + δ̂₀`; `β̂ = β̂₀`.

use std::f64::consts::{FRAC_2_PI, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::ols;
use crate::stable::{is_alpha_one, tan_half_pi, Parametrization, StableParams};

/// Smallest sample accepted by the estimators.
pub const MIN_SAMPLE: usize = 20;

/// Lower clamp applied to every α estimate.
pub const MIN_ALPHA: f64 = 0.1;

/// Fixed Kogon–Williams frequency grid `0.1, 0.2, …, 1.0`.
pub const KW_GRID: [f64; 10] = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0];

/// Location frequencies `(3^{2.3})^{3.7}` and `(3^{2.1})^{3.7}`.
pub fn press_frequencies() -> (f64, f64) {
    (3f64.powf(2.3).powf(3.7), 3f64.powf(2.1).powf(3.7))
}

/// Squared ECF moduli at or below this are dropped before taking logs.
const MODULUS_FLOOR: f64 = 1e-300;

/// `(1/n) Σ_j e^{i t x_j}`.
pub fn ecf(sample: &[f64], t: f64) -> Complex64 {
    let (c, s) = sample.iter().fold((0.0, 0.0), |(c, s), &x| {
        let (sn, cs) = (t * x).sin_cos();
        (c + cs, s + sn)
    });
    Complex64::new(c, s) / sample.len() as f64
}

fn clamp_alpha(a: f64) -> f64 {
    if a.is_nan() {
        MIN_ALPHA
    } else {
        a.clamp(MIN_ALPHA, 2.0)
    }
}

fn check_sample(sample: &[f64]) -> Result<()> {
    if sample.len() < MIN_SAMPLE {
        return Err(Error::InvalidParams(format!(
            "need at least {MIN_SAMPLE} observations, got {}",
            sample.len()
        )));
    }
    if sample.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidParams("sample contains non-finite values".into()));
    }
    let first = sample[0];
    if sample.iter().all(|&x| x == first) {
        return Err(Error::DegenerateSample("all observations are equal".into()));
    }
    Ok(())
}

/// OLS data for `ln(−ln|φ(t)|²) = ln(2σ^α) + α ln|t|`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionPoints {
    pub y: Vec<f64>,
    pub a: Vec<f64>,
    pub mu_hat: f64,
    pub slope_hat: f64,
}

impl RegressionPoints {
    /// Regress on `(t_k, |φ(t_k)|²)` pairs, skipping pairs whose response is
    /// not finite.
    pub fn fit(t: &[f64], sq_modulus: &[f64]) -> Result<Self> {
        let (a, y): (Vec<f64>, Vec<f64>) = t
            .iter()
            .zip(sq_modulus)
            .filter(|(_, &m)| m > MODULUS_FLOOR)
            .map(|(&t, &m)| (t.abs().ln(), (-m.ln()).ln()))
            .filter(|(a, y)| a.is_finite() && y.is_finite())
            .unzip();
        if y.len() < 2 {
            return Err(Error::InsufficientPoints { usable: y.len() });
        }
        let (slope_hat, mu_hat) = ols(&a, &y).map_err(|e| match e {
            Error::CollinearInput => Error::InsufficientPoints { usable: 1 },
            e => e,
        })?;
        Ok(Self { y, a, mu_hat, slope_hat })
    }

    /// `(α, σ)` with α clamped to `[MIN_ALPHA, 2]` and `σ = (e^μ/2)^{1/α}`.
    pub fn alpha_sigma(&self) -> (f64, f64) {
        let alpha = clamp_alpha(self.slope_hat);
        (alpha, (0.5 * self.mu_hat.exp()).powf(1.0 / alpha))
    }
}

/// Kogon–Williams regressions on characteristic-function values `cf` taken at
/// frequencies `grid` (all positive). Returns Zero-parametrization estimates.
///
/// The first regression fits α and σ from the modulus; the second fits δ and
/// β from the phase `u(t) = δt + β tan(πα/2)((σt)^α − σt)` (α ≠ 1) or
/// `u(t) = δt − β(2/π)σt ln(σt)` (α = 1), without intercept.
pub fn kw_regress(grid: &[f64], cf: &[Complex64]) -> Result<StableParams> {
    if grid.len() != cf.len() {
        return Err(Error::DimensionMismatch {
            expected: grid.len(),
            got: cf.len(),
        });
    }
    let sq: Vec<f64> = cf.iter().map(|c| c.norm_sqr()).collect();
    let (alpha, sigma) = RegressionPoints::fit(grid, &sq)?.alpha_sigma();

    let phase: Vec<f64> = cf.iter().map(|c| c.im.atan2(c.re)).collect();
    let skew_regressor: Vec<f64> = grid
        .iter()
        .map(|&t| {
            let st = sigma * t;
            if is_alpha_one(alpha) {
                -FRAC_2_PI * st * st.ln()
            } else {
                tan_half_pi(alpha) * (st.powf(alpha) - st)
            }
        })
        .collect();

    let s11: f64 = grid.iter().map(|t| t * t).sum();
    let s12: f64 = grid.iter().zip(&skew_regressor).map(|(t, x)| t * x).sum();
    let s22: f64 = skew_regressor.iter().map(|x| x * x).sum();
    let r1: f64 = grid.iter().zip(&phase).map(|(t, u)| t * u).sum();
    let r2: f64 = skew_regressor.iter().zip(&phase).map(|(x, u)| x * u).sum();
    let det = s11 * s22 - s12 * s12;

    let beta = if s22 > 1e-24 * s11 && det.abs() > 1e-12 * s11 * s22 {
        ((s11 * r2 - s12 * r1) / det).clamp(-1.0, 1.0)
    } else {
        0.0
    };
    // δ given β; equals the joint solution whenever β was not clamped
    let delta = (r1 - beta * s12) / s11;

    Ok(StableParams {
        alpha,
        beta,
        sigma,
        delta,
        param: Parametrization::Zero,
    })
}

/// Quantile pre-standardization: median and half the interquartile range
/// (falling back to the mean absolute deviation when the IQR is zero).
fn robust_location_scale(sample: &[f64]) -> Result<(f64, f64)> {
    let mut xs = sample.to_vec();
    xs.sort_by(f64::total_cmp);
    let q = |p: f64| {
        let h = p * (xs.len() - 1) as f64;
        let lo = h.floor() as usize;
        let hi = (lo + 1).min(xs.len() - 1);
        xs[lo] + (h - lo as f64) * (xs[hi] - xs[lo])
    };
    let median = q(0.5);
    let mut scale = 0.5 * (q(0.75) - q(0.25));
    if !(scale > 0.0) {
        scale = xs.iter().map(|x| (x - median).abs()).sum::<f64>() / xs.len() as f64;
    }
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(Error::DegenerateSample("zero dispersion".into()));
    }
    Ok((median, scale))
}

/// Kogon–Williams initial estimates in the Zero parametrization.
pub fn kw_initial(sample: &[f64]) -> Result<StableParams> {
    check_sample(sample)?;
    let (loc, scale) = robust_location_scale(sample)?;
    let standardized: Vec<f64> = sample.iter().map(|x| (x - loc) / scale).collect();
    let cf: Vec<Complex64> = KW_GRID.iter().map(|&t| ecf(&standardized, t)).collect();
    let p = kw_regress(&KW_GRID, &cf)?;
    // Zero parametrization is location-scale equivariant
    Ok(StableParams {
        sigma: p.sigma * scale,
        delta: p.delta * scale + loc,
        ..p
    })
}

fn f1(alpha: f64) -> f64 {
    24.36 * alpha.powf(-1.47)
}

fn f2(alpha: f64) -> f64 {
    20.58 * alpha.powf(-1.43)
}

fn f3(alpha: f64) -> f64 {
    (((122.9 * alpha - 648.2) * alpha + 1245.0) * alpha - 1040.0) * alpha + 335.2
}

/// Number of regression frequencies for Step 2.
///
/// `f1`, `f2`, `f3` are fitted to the n = 200, 800, 1600 columns of the
/// Koutrouvelis table. Between the columns the value is interpolated linearly
/// in `n`; above 1600 the 800–1600 line is extrapolated; below 200 `f1` is
/// used. The result is rounded and clamped to `[9, 134]`.
pub fn select_k(alpha0: f64, n: usize) -> usize {
    let alpha = clamp_alpha(alpha0);
    let n = n as f64;
    let lerp = |n0: f64, y0: f64, n1: f64, y1: f64| y0 + (n - n0) / (n1 - n0) * (y1 - y0);
    let k = if n <= 200.0 {
        f1(alpha)
    } else if n <= 800.0 {
        lerp(200.0, f1(alpha), 800.0, f2(alpha))
    } else {
        lerp(800.0, f2(alpha), 1600.0, f3(alpha))
    };
    if k.is_nan() {
        return 9;
    }
    k.round().clamp(9.0, 134.0) as usize
}

/// `t_k = πk/25` for `k = 1..=k`.
pub fn regression_grid(k: usize) -> Vec<f64> {
    (1..=k).map(|i| PI * i as f64 / 25.0).collect()
}

/// Step 2: `(α̂₁, σ̂₁)` from `k` regression frequencies on the normalized sample.
pub fn regress_alpha_sigma(normalized: &[f64], k: usize) -> Result<(f64, f64)> {
    if k < 2 {
        return Err(Error::InsufficientPoints { usable: k });
    }
    let t = regression_grid(k);
    let sq: Vec<f64> = t.iter().map(|&t| ecf(normalized, t).norm_sqr()).collect();
    Ok(RegressionPoints::fit(&t, &sq)?.alpha_sigma())
}

/// Two-point location estimate from phases `u1 = û(t1)`, `u2 = û(t2)`.
///
/// Solves `u(t)/t = δ₁ + c|t|^{α−1}` at both points for δ₁ (weights `ln|t|`
/// replace `|t|^{α−1}` at α = 1).
pub fn press_delta_from_phase(u1: f64, t1: f64, u2: f64, t2: f64, alpha1: f64) -> Result<f64> {
    let (w1, w2) = if is_alpha_one(alpha1) {
        (t1.abs().ln(), t2.abs().ln())
    } else {
        (t1.abs().powf(alpha1 - 1.0), t2.abs().powf(alpha1 - 1.0))
    };
    let denom = w2 - w1;
    if !(denom.abs() >= 1e-14) {
        return Err(Error::DegenerateWeights(denom));
    }
    Ok((w2 * u1 / t1 - w1 * u2 / t2) / denom)
}

/// Step 3: δ̂₁ of the normalized sample from the ECF phase at the two fixed
/// frequencies of [`press_frequencies`].
pub fn press_delta(normalized: &[f64], alpha1: f64) -> Result<f64> {
    let (t1, t2) = press_frequencies();
    let phase = |t: f64| {
        let c = ecf(normalized, t);
        c.im.atan2(c.re)
    };
    press_delta_from_phase(phase(t1), t1, phase(t2), t2, alpha1)
}

/// Regression-stage estimates on the normalized sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StageEstimates {
    pub alpha: f64,
    pub sigma: f64,
    pub delta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UniFitReport {
    pub initial: StableParams,
    pub stage: StageEstimates,
    #[serde(rename = "final")]
    pub estimate: StableParams,
    pub k_used: usize,
    pub t_grid: Vec<f64>,
}

/// Step 4: recombine the initial and regression-stage estimates.
pub fn combine(initial: &StableParams, stage: &StageEstimates) -> StableParams {
    StableParams {
        alpha: clamp_alpha(stage.alpha),
        beta: initial.beta,
        sigma: initial.sigma * stage.sigma,
        delta: initial.sigma * stage.delta + initial.delta,
        param: Parametrization::Zero,
    }
}

pub fn hybrid_fit(sample: &[f64]) -> Result<UniFitReport> {
    let initial = kw_initial(sample)?;
    let normalized: Vec<f64> = sample
        .iter()
        .map(|x| (x - initial.delta) / initial.sigma)
        .collect();
    let k = select_k(initial.alpha, sample.len());
    let (alpha, sigma) = regress_alpha_sigma(&normalized, k)?;
    let delta = press_delta(&normalized, alpha)?;
    let stage = StageEstimates { alpha, sigma, delta };
    let estimate = combine(&initial, &stage);
    if !(estimate.sigma > 0.0 && estimate.sigma.is_finite() && estimate.delta.is_finite()) {
        return Err(Error::DegenerateSample(format!("non-finite estimates {estimate:?}")));
    }
    Ok(UniFitReport {
        initial,
        stage,
        estimate,
        k_used: k,
        t_grid: regression_grid(k),
    })
}

/// Univariate estimator choice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum UniEstimator {
    #[default]
    Hybrid,
    #[serde(rename = "kw")]
    KogonWilliams,
}

pub fn fit_uni(sample: &[f64], estimator: UniEstimator) -> Result<StableParams> {
    match estimator {
        UniEstimator::Hybrid => Ok(hybrid_fit(sample)?.estimate),
        UniEstimator::KogonWilliams => kw_initial(sample),
    }
}
