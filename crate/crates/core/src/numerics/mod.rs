//! Shared numerical kernels.

mod cdf;
mod ks;
mod linalg;
mod nnls;
mod quad;

pub use cdf::{stable_cdf, CDF_TOLERANCE};
pub use ks::{ks_pvalue, ks_statistic, try_ks_statistic};
pub use linalg::{condition_number, condition_number_complex, lstsq, ols, LinearSystem};
pub use nnls::nnls;
pub use quad::{gauss_kronrod, Integral};
