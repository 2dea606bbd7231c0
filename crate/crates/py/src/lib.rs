use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyComplex;
use stablefit::numerics::{ks_pvalue, stable_cdf as cdf, try_ks_statistic};
use stablefit::univariate::fit_uni;
use stablefit::{Parametrization, RngSeed, SpectralModel, UniEstimator};

fn err(e: stablefit::Error) -> PyErr {
    PyValueError::new_err(format!("{}: {e}", e.category()))
}

fn parse_param(param: &str) -> PyResult<Parametrization> {
    match param {
        "zero" | "0" => Ok(Parametrization::Zero),
        "one" | "1" => Ok(Parametrization::One),
        other => Err(PyValueError::new_err(format!("unknown parametrization {other:?}"))),
    }
}

fn parse_estimator(name: &str) -> PyResult<UniEstimator> {
    match name {
        "hybrid" => Ok(UniEstimator::Hybrid),
        "kw" => Ok(UniEstimator::KogonWilliams),
        other => Err(PyValueError::new_err(format!("unknown estimator {other:?}"))),
    }
}

/// Univariate stable law `S(alpha, beta, sigma, delta)`.
#[pyclass(name = "StableParams", module = "pystablefit", skip_from_py_object)]
#[derive(Clone)]
struct PyStableParams {
    inner: stablefit::StableParams,
}

#[pymethods]
impl PyStableParams {
    #[new]
    #[pyo3(signature = (alpha, beta = 0.0, sigma = 1.0, delta = 0.0, param = "zero"))]
    fn new(alpha: f64, beta: f64, sigma: f64, delta: f64, param: &str) -> PyResult<Self> {
        let inner = stablefit::StableParams::new(alpha, beta, sigma, delta, parse_param(param)?).map_err(err)?;
        Ok(Self { inner })
    }

    #[getter]
    fn alpha(&self) -> f64 {
        self.inner.alpha
    }

    #[getter]
    fn beta(&self) -> f64 {
        self.inner.beta
    }

    #[getter]
    fn sigma(&self) -> f64 {
        self.inner.sigma
    }

    #[getter]
    fn delta(&self) -> f64 {
        self.inner.delta
    }

    #[getter]
    fn param(&self) -> &'static str {
        match self.inner.param {
            Parametrization::Zero => "zero",
            Parametrization::One => "one",
        }
    }

    fn to_zero(&self) -> Self {
        Self {
            inner: self.inner.to_zero(),
        }
    }

    fn to_one(&self) -> Self {
        Self {
            inner: self.inner.to_one(),
        }
    }

    fn charfn<'py>(&self, py: Python<'py>, t: f64) -> Bound<'py, PyComplex> {
        let z = stablefit::charfn_uni(&self.inner, t);
        PyComplex::from_doubles(py, z.re, z.im)
    }

    fn cdf(&self, x: f64) -> PyResult<f64> {
        cdf(&self.inner, x).map_err(err)
    }

    #[pyo3(signature = (n, seed = 0))]
    fn sample(&self, py: Python<'_>, n: usize, seed: u64) -> PyResult<Vec<f64>> {
        let p = self.inner;
        py.detach(|| stablefit::sample_uni(&p, n, RngSeed(seed))).map_err(err)
    }

    fn __repr__(&self) -> String {
        let p = &self.inner;
        format!(
            "StableParams(alpha={}, beta={}, sigma={}, delta={}, param='{}')",
            p.alpha,
            p.beta,
            p.sigma,
            p.delta,
            self.param()
        )
    }
}

/// Fit a univariate law with the hybrid (default) or Kogon-Williams estimator.
#[pyfunction]
#[pyo3(signature = (x, estimator = "hybrid"))]
fn fit(py: Python<'_>, x: Vec<f64>, estimator: &str) -> PyResult<PyStableParams> {
    let estimator = parse_estimator(estimator)?;
    let inner = py.detach(|| fit_uni(&x, estimator)).map_err(err)?;
    Ok(PyStableParams { inner })
}

/// Full hybrid report (initial fit, regression stage, final estimate) as JSON.
#[pyfunction]
fn hybrid_report_json(py: Python<'_>, x: Vec<f64>) -> PyResult<String> {
    let report = py.detach(|| stablefit::hybrid_fit(&x)).map_err(err)?;
    Ok(serde_json::to_string(&report).expect("report serializes"))
}

/// Kolmogorov-Smirnov statistic and asymptotic p-value of `x` against `params`.
#[pyfunction]
fn ks_test(py: Python<'_>, x: Vec<f64>, params: PyRef<'_, PyStableParams>) -> PyResult<(f64, f64)> {
    let p = params.inner;
    let d = py.detach(|| try_ks_statistic(&x, |v| cdf(&p, v))).map_err(err)?;
    Ok((d, ks_pvalue(d, x.len())))
}

/// Sample from a spectral model whose point masses sit on the standard grid.
#[pyfunction]
#[pyo3(signature = (alpha, d, weights, n, seed = 0, shift = None))]
fn sample_mv(
    py: Python<'_>,
    alpha: f64,
    d: usize,
    weights: Vec<f64>,
    n: usize,
    seed: u64,
    shift: Option<Vec<f64>>,
) -> PyResult<Vec<Vec<f64>>> {
    let model = SpectralModel::on_grid(alpha, d, weights, shift.unwrap_or_else(|| vec![0.0; d])).map_err(err)?;
    let sample = py.detach(|| stablefit::sample_mv(&model, n, RngSeed(seed))).map_err(err)?;
    Ok(sample.rows().map(<[f64]>::to_vec).collect())
}

#[pyclass(name = "SpectralFit", module = "pystablefit", get_all)]
struct PySpectralFit {
    alpha_hat: f64,
    delta_hat: Vec<f64>,
    gamma_hat: Vec<f64>,
    points: Vec<Vec<f64>>,
    method: String,
}

#[pymethods]
impl PySpectralFit {
    fn __repr__(&self) -> String {
        format!(
            "SpectralFit(alpha_hat={}, delta_hat={:?}, gamma_hat={:?}, method='{}')",
            self.alpha_hat, self.delta_hat, self.gamma_hat, self.method
        )
    }
}

/// Estimate the index, shift and discrete spectral measure from rows of data.
#[pyfunction]
#[pyo3(name = "fit_spectral", signature = (rows, L))]
#[allow(non_snake_case)]
fn fit_spectral_py(py: Python<'_>, rows: Vec<Vec<f64>>, L: usize) -> PyResult<PySpectralFit> {
    let fit = py
        .detach(|| {
            let data = stablefit::MultiSample::from_rows(&rows)?;
            stablefit::fit_spectral(&data, L)
        })
        .map_err(err)?;
    Ok(PySpectralFit {
        alpha_hat: fit.alpha_hat,
        delta_hat: fit.delta_hat,
        gamma_hat: fit.gamma_hat,
        points: fit.grid.points,
        method: format!("{:?}", fit.method),
    })
}

#[pymodule]
fn pystablefit(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyStableParams>()?;
    m.add_class::<PySpectralFit>()?;
    m.add_function(wrap_pyfunction!(fit, m)?)?;
    m.add_function(wrap_pyfunction!(hybrid_report_json, m)?)?;
    m.add_function(wrap_pyfunction!(ks_test, m)?)?;
    m.add_function(wrap_pyfunction!(sample_mv, m)?)?;
    m.add_function(wrap_pyfunction!(fit_spectral_py, m)?)?;
    Ok(())
}
