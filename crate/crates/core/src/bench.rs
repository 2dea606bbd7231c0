//! Monte-Carlo harness: simulate, fit and aggregate replicates.
//!
//! Replicate `i` draws from `seed.split(i)`, so results do not depend on how
//! replicates are scheduled. Outcomes are collected by index and summed in
//! order with compensated summation.

use std::fmt::Write as _;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::simulate::{sample_mv, sample_uni, RngSeed};
use crate::spectral::fit_spectral;
use crate::stable::{SpectralModel, StableParams};
use crate::univariate::{fit_uni, UniEstimator, MIN_SAMPLE};

/// Runs with a larger share of failed replicates are marked invalid.
pub const MAX_FAILURE_RATE: f64 = 0.1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TrueModel {
    Uni(StableParams),
    Spectral(SpectralModel),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Estimator {
    Hybrid,
    #[serde(rename = "kw")]
    KogonWilliams,
    #[serde(rename = "spectral-ecf")]
    SpectralEcf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McConfig {
    pub true_model: TrueModel,
    pub n: usize,
    pub replicates: usize,
    pub seed: RngSeed,
    pub estimator: Estimator,
}

impl McConfig {
    pub fn validate(&self) -> Result<()> {
        if self.replicates < 1 {
            return Err(Error::InvalidConfig("replicates must be at least 1".into()));
        }
        if self.n < MIN_SAMPLE {
            return Err(Error::InvalidConfig(format!("n must be at least {MIN_SAMPLE}")));
        }
        match (&self.true_model, self.estimator) {
            (TrueModel::Uni(p), Estimator::Hybrid | Estimator::KogonWilliams) => p.validate(),
            (TrueModel::Spectral(m), Estimator::SpectralEcf) => m.validate(),
            _ => Err(Error::InvalidConfig(
                "estimator does not match the kind of true model".into(),
            )),
        }
    }

    /// Parameter names and true values in reporting order.
    pub fn targets(&self) -> Vec<(String, f64)> {
        match &self.true_model {
            TrueModel::Uni(p) => {
                // estimates are reported in the Zero parametrization
                let z = p.to_zero();
                vec![
                    ("alpha".into(), z.alpha),
                    ("beta".into(), z.beta),
                    ("sigma".into(), z.sigma),
                    ("delta".into(), z.delta),
                ]
            }
            TrueModel::Spectral(m) => {
                let mut t = vec![("alpha".to_string(), m.alpha)];
                t.extend(m.shift.iter().enumerate().map(|(j, &v)| (format!("delta_{}", j + 1), v)));
                t.extend(m.weights.iter().enumerate().map(|(l, &v)| (format!("gamma_{}", l + 1), v)));
                t
            }
        }
    }

    fn replicate(&self, index: usize) -> Result<Vec<f64>> {
        let seed = self.seed.split(index as u64);
        match (&self.true_model, self.estimator) {
            (TrueModel::Uni(p), Estimator::Hybrid) => estimates_uni(&sample_uni(p, self.n, seed)?, UniEstimator::Hybrid),
            (TrueModel::Uni(p), Estimator::KogonWilliams) => {
                estimates_uni(&sample_uni(p, self.n, seed)?, UniEstimator::KogonWilliams)
            }
            (TrueModel::Spectral(m), Estimator::SpectralEcf) => {
                let fit = fit_spectral(&sample_mv(m, self.n, seed)?, m.len())?;
                let mut v = vec![fit.alpha_hat];
                v.extend(fit.delta_hat);
                v.extend(fit.gamma_hat);
                Ok(v)
            }
            _ => Err(Error::InvalidConfig("estimator does not match the kind of true model".into())),
        }
    }
}

fn estimates_uni(sample: &[f64], estimator: UniEstimator) -> Result<Vec<f64>> {
    let p = fit_uni(sample, estimator)?;
    Ok(vec![p.alpha, p.beta, p.sigma, p.delta])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamMetrics {
    pub parameter: String,
    pub true_value: f64,
    pub mean: f64,
    pub sd: f64,
    pub mse: f64,
    pub rmse: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McMetrics {
    pub config: McConfig,
    pub successes: usize,
    pub failures: usize,
    pub valid: bool,
    /// Empty when every replicate failed.
    pub params: Vec<ParamMetrics>,
    /// Not serialized, so emitted output is reproducible.
    #[serde(skip)]
    pub wall_time_secs: f64,
}

impl McMetrics {
    pub fn get(&self, parameter: &str) -> Option<&ParamMetrics> {
        self.params.iter().find(|p| p.parameter == parameter)
    }
}

/// Neumaier-compensated sum.
fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for v in values {
        let t = sum + v;
        comp += if sum.abs() >= v.abs() { (sum - t) + v } else { (v - t) + sum };
        sum = t;
    }
    sum + comp
}

/// Mean, sd (R−1 denominator, 0 for a single value) and MSE against `truth`.
pub fn summarize(values: &[f64], truth: f64) -> (f64, f64, f64) {
    let r = values.len() as f64;
    let mean = compensated_sum(values.iter().copied()) / r;
    let sd = if values.len() > 1 {
        (compensated_sum(values.iter().map(|v| (v - mean).powi(2))) / (r - 1.0)).sqrt()
    } else {
        0.0
    };
    let mse = compensated_sum(values.iter().map(|v| (v - truth).powi(2))) / r;
    (mean, sd, mse)
}

fn aggregate(config: &McConfig, outcomes: Vec<Result<Vec<f64>>>, wall_time_secs: f64) -> McMetrics {
    let successes: Vec<Vec<f64>> = outcomes.into_iter().filter_map(|o| o.ok()).collect();
    let failures = config.replicates - successes.len();
    let params = if successes.is_empty() {
        Vec::new()
    } else {
        config
            .targets()
            .into_iter()
            .enumerate()
            .map(|(j, (parameter, true_value))| {
                let column: Vec<f64> = successes.iter().map(|s| s[j]).collect();
                let (mean, sd, mse) = summarize(&column, true_value);
                ParamMetrics {
                    parameter,
                    true_value,
                    mean,
                    sd,
                    mse,
                    rmse: mse.sqrt(),
                }
            })
            .collect()
    };
    McMetrics {
        config: config.clone(),
        successes: successes.len(),
        failures,
        valid: !successes.is_empty() && failures as f64 <= MAX_FAILURE_RATE * config.replicates as f64,
        params,
        wall_time_secs,
    }
}

/// Run on the global rayon pool.
pub fn run_mc(config: &McConfig) -> Result<McMetrics> {
    use rayon::prelude::*;
    config.validate()?;
    let start = Instant::now();
    let outcomes: Vec<Result<Vec<f64>>> = (0..config.replicates)
        .into_par_iter()
        .map(|i| config.replicate(i))
        .collect();
    Ok(aggregate(config, outcomes, start.elapsed().as_secs_f64()))
}

/// Run on a dedicated pool of `threads` workers (`None` = available cores).
pub fn run_mc_with_threads(config: &McConfig, threads: Option<usize>) -> Result<McMetrics> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.unwrap_or(0))
        .build()
        .map_err(|e| Error::InvalidConfig(e.to_string()))?;
    pool.install(|| run_mc(config))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Text,
    Csv,
    Json,
}

pub const COLUMNS: [&str; 6] = ["parameter", "true_value", "mean", "sd", "mse", "rmse"];

fn describe(config: &McConfig) -> String {
    let est = match config.estimator {
        Estimator::Hybrid => "hybrid",
        Estimator::KogonWilliams => "kw",
        Estimator::SpectralEcf => "spectral-ecf",
    };
    let model = match &config.true_model {
        TrueModel::Uni(p) => format!(
            "alpha={} beta={} sigma={} delta={} ({:?})",
            p.alpha, p.beta, p.sigma, p.delta, p.param
        ),
        TrueModel::Spectral(m) => format!("alpha={} d={} L={}", m.alpha, m.dim(), m.len()),
    };
    format!(
        "{est}: {model}, n={}, replicates={}, seed={}",
        config.n, config.replicates, config.seed.0
    )
}

/// Render metrics as an aligned text table, CSV with the [`COLUMNS`] header,
/// or a pretty-printed JSON array.
pub fn emit_table(metrics: &[McMetrics], format: Format) -> Vec<u8> {
    match format {
        Format::Json => {
            let mut out = serde_json::to_vec_pretty(metrics).expect("metrics serialize");
            out.push(b'\n');
            out
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(COLUMNS).expect("in-memory write");
            for m in metrics {
                for p in &m.params {
                    w.write_record([
                        p.parameter.clone(),
                        p.true_value.to_string(),
                        p.mean.to_string(),
                        p.sd.to_string(),
                        p.mse.to_string(),
                        p.rmse.to_string(),
                    ])
                    .expect("in-memory write");
                }
            }
            w.into_inner().expect("in-memory flush")
        }
        Format::Text => {
            let mut s = String::new();
            for (i, m) in metrics.iter().enumerate() {
                if i > 0 {
                    s.push('\n');
                }
                let _ = writeln!(s, "{}", describe(&m.config));
                let _ = writeln!(
                    s,
                    "successes={} failures={}{}",
                    m.successes,
                    m.failures,
                    if m.valid { "" } else { " INVALID" }
                );
                let _ = writeln!(
                    s,
                    "{:<10} {:>12} {:>12} {:>12} {:>12} {:>12}",
                    COLUMNS[0], COLUMNS[1], COLUMNS[2], COLUMNS[3], COLUMNS[4], COLUMNS[5]
                );
                for p in &m.params {
                    let _ = writeln!(
                        s,
                        "{:<10} {:>12.6} {:>12.6} {:>12.6} {:>12.6} {:>12.6}",
                        p.parameter, p.true_value, p.mean, p.sd, p.mse, p.rmse
                    );
                }
            }
            s.into_bytes()
        }
    }
}
