//! CSV ingestion, return transforms, K-S goodness of fit and the JSON
//! spectral-model file format.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{ks_pvalue, stable_cdf, try_ks_statistic};
use crate::simulate::MultiSample;
use crate::stable::{SpectralModel, StableParams};
use crate::univariate::{fit_uni, UniEstimator, MIN_SAMPLE};

/// Read one numeric column. `column` is a header name or a zero-based index;
/// `None` selects the first column. Blank cells are rejected like any other
/// non-numeric cell.
pub fn load_csv(path: impl AsRef<Path>, column: Option<&str>, has_header: bool) -> Result<Vec<f64>> {
    let path = path.as_ref();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(has_header)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;

    let index = if has_header {
        let headers = reader.headers().map_err(|e| Error::Io(e.to_string()))?.clone();
        if headers.is_empty() {
            return Err(Error::EmptyInput);
        }
        match column {
            None => 0,
            Some(c) => match headers.iter().position(|h| h == c) {
                Some(i) => i,
                None => c
                    .parse::<usize>()
                    .ok()
                    .filter(|&i| i < headers.len())
                    .ok_or_else(|| Error::MissingColumn(c.to_string()))?,
            },
        }
    } else {
        match column {
            None => 0,
            Some(c) => c.parse::<usize>().map_err(|_| Error::MissingColumn(c.to_string()))?,
        }
    };
    let name = column.map_or_else(|| index.to_string(), str::to_string);

    let mut values = Vec::new();
    for (k, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::Io(e.to_string()))?;
        let row = k + 1 + usize::from(has_header);
        let cell = record.get(index).ok_or_else(|| Error::MissingColumn(name.clone()))?;
        let v: f64 = cell.parse().map_err(|_| Error::Parse {
            row,
            column: name.clone(),
            value: cell.to_string(),
        })?;
        if !v.is_finite() {
            return Err(Error::Parse {
                row,
                column: name.clone(),
                value: cell.to_string(),
            });
        }
        values.push(v);
    }
    if values.is_empty() {
        return Err(Error::EmptyInput);
    }
    Ok(values)
}

/// Read every column of a numeric CSV as one observation per row.
pub fn load_csv_matrix(path: impl AsRef<Path>, has_header: bool) -> Result<MultiSample> {
    let path = path.as_ref();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(has_header)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let names: Vec<String> = if has_header {
        reader
            .headers()
            .map_err(|e| Error::Io(e.to_string()))?
            .iter()
            .map(str::to_string)
            .collect()
    } else {
        Vec::new()
    };
    let mut data = Vec::new();
    let mut width = 0;
    for (k, record) in reader.records().enumerate() {
        // ragged rows are reported by the csv reader itself
        let record = record.map_err(|e| Error::Io(e.to_string()))?;
        width = record.len();
        for (j, cell) in record.iter().enumerate() {
            let v: f64 = cell.parse().ok().filter(|v: &f64| v.is_finite()).ok_or_else(|| Error::Parse {
                row: k + 1 + usize::from(has_header),
                column: names.get(j).cloned().unwrap_or_else(|| j.to_string()),
                value: cell.to_string(),
            })?;
            data.push(v);
        }
    }
    if data.is_empty() || width == 0 {
        return Err(Error::EmptyInput);
    }
    let n = data.len() / width;
    MultiSample::new(data, n, width)
}

fn check_prices(prices: &[f64]) -> Result<()> {
    if prices.len() < 2 {
        return Err(Error::InvalidParams("need at least two prices".into()));
    }
    match prices.iter().position(|p| !(*p > 0.0 && p.is_finite())) {
        Some(index) => Err(Error::NonPositivePrice {
            index,
            value: prices[index],
        }),
        None => Ok(()),
    }
}

/// `r_t = ln(p_t / p_{t−1})`.
pub fn to_log_returns(prices: &[f64]) -> Result<Vec<f64>> {
    check_prices(prices)?;
    Ok(prices.windows(2).map(|w| (w[1] / w[0]).ln()).collect())
}

/// `r_t = p_t / p_{t−1} − 1`.
pub fn to_simple_returns(prices: &[f64]) -> Result<Vec<f64>> {
    check_prices(prices)?;
    Ok(prices.windows(2).map(|w| w[1] / w[0] - 1.0).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum ReturnKind {
    #[default]
    Log,
    Simple,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReturnsSeries {
    pub values: Vec<f64>,
    pub source: PathBuf,
    pub column: String,
}

impl ReturnsSeries {
    /// Load prices and difference them.
    pub fn from_prices_csv(path: impl AsRef<Path>, column: Option<&str>, has_header: bool, kind: ReturnKind) -> Result<Self> {
        let path = path.as_ref();
        let prices = load_csv(path, column, has_header)?;
        let values = match kind {
            ReturnKind::Log => to_log_returns(&prices)?,
            ReturnKind::Simple => to_simple_returns(&prices)?,
        };
        if values.len() < MIN_SAMPLE + 1 {
            return Err(Error::InvalidParams(format!(
                "{} returns after differencing, need at least {}",
                values.len(),
                MIN_SAMPLE + 1
            )));
        }
        Ok(Self {
            values,
            source: path.to_path_buf(),
            column: column.unwrap_or("0").to_string(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GofReport {
    pub estimator: UniEstimator,
    pub estimate: StableParams,
    pub n: usize,
    pub ks_statistic: f64,
    pub p_value: f64,
}

/// Fit and test the fitted law with the one-sample K-S statistic.
pub fn goodness_of_fit(values: &[f64], estimator: UniEstimator) -> Result<GofReport> {
    let estimate = fit_uni(values, estimator)?;
    let d = try_ks_statistic(values, |x| stable_cdf(&estimate, x))?;
    Ok(GofReport {
        estimator,
        estimate,
        n: values.len(),
        ks_statistic: d,
        p_value: ks_pvalue(d, values.len()),
    })
}

/// On-disk spectral model: point masses are implied by `(d, L)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralModelSpec {
    pub alpha: f64,
    pub d: usize,
    #[serde(rename = "L")]
    pub l: usize,
    pub weights: Vec<f64>,
    #[serde(default)]
    pub shift: Option<Vec<f64>>,
}

impl SpectralModelSpec {
    pub fn into_model(self) -> Result<SpectralModel> {
        if self.weights.len() != self.l {
            return Err(Error::DimensionMismatch {
                expected: self.l,
                got: self.weights.len(),
            });
        }
        let shift = self.shift.unwrap_or_else(|| vec![0.0; self.d]);
        if shift.len() != self.d {
            return Err(Error::DimensionMismatch {
                expected: self.d,
                got: shift.len(),
            });
        }
        SpectralModel::on_grid(self.alpha, self.d, self.weights, shift)
    }

    pub fn from_json_file(path: impl AsRef<Path>) -> Result<SpectralModel> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        let spec: Self = serde_json::from_str(&text).map_err(|e| Error::InvalidConfig(e.to_string()))?;
        spec.into_model()
    }
}
