//! Estimation of α-stable laws from the empirical characteristic function.
//!
//! * [`stable`]: parametrizations, characteristic functions, spectral models.
//! * [`simulate`]: seeded univariate and multivariate samplers.
//! * [`univariate`]: Kogon–Williams initial fit and the hybrid estimator.
//! * [`spectral`]: discrete spectral-measure estimation for d = 1, 2, 3.
//! * [`numerics`]: OLS, NNLS, quadrature, stable CDF, Kolmogorov–Smirnov.
//! * [`bench`]: Monte-Carlo harness.
//! * [`data`]: CSV input, returns and goodness of fit.

pub mod bench;
pub mod data;
pub mod error;
pub mod numerics;
pub mod simulate;
pub mod spectral;
pub mod stable;
pub mod univariate;

pub use error::{Error, Result};
pub use simulate::{sample_mv, sample_uni, MultiSample, RngSeed};
pub use spectral::{fit_spectral, fit_spectral_with, GridSpec, SpectralFit, SpectralMethod};
pub use stable::{charfn_mv, charfn_uni, Parametrization, SpectralModel, StableParams};
pub use univariate::{hybrid_fit, kw_initial, UniEstimator, UniFitReport};
