//! Largest-eigenvalue detection with an estimated noise covariance.
//!
//! The detector compares `lambda_hat = lambda_max(Sigma_hat^{-1} R_hat)` to a
//! threshold, where `Sigma_hat` comes from `n` noise-only samples and `R_hat`
//! from `p` samples that may carry a rank-one signal. This crate provides
//!
//! * [`exactcdf`]: the exact finite-dimensional CDF of `lambda_hat`,
//! * [`roc`]: exact and limiting ROC curves,
//! * [`asympt`]: high-dimensional Tracy-Widom / Gaussian approximations,
//! * [`matint`]: the auxiliary matrix integral and its series identity,
//! * [`mcsim`]: a Monte Carlo simulator of the detector,
//! * [`specfun`]: the special functions underneath.

pub mod asympt;
pub(crate) mod det;
pub mod error;
pub mod exactcdf;
pub mod matint;
pub mod mcsim;
pub mod report;
pub mod roc;
pub mod specfun;
pub mod validate;

pub use error::{Error, Result};
pub use exactcdf::{ModelDims, Noncentrality};
