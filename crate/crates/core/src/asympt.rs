//! High-dimensional approximations for `m, n, p -> infinity` with
//! `m/p -> c1` and `m/n -> c2`: bulk edge and Tracy-Widom scale, spike
//! location and Gaussian scale above the phase transition, and the resulting
//! asymptotic power.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::specfun::{gaussian_q, normal_cdf, tw2_cdf, tw2_quantile};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumParams {
    c1: f64,
    c2: f64,
    gamma: f64,
}

impl SpectrumParams {
    pub fn new(c1: f64, c2: f64, gamma: f64) -> Result<Self> {
        if c2 == 1.0 {
            return Err(Error::Domain(
                "c2 = 1 (m = n) has its own limit laws: use exactcdf::limiting_scaled_cdf \
                 and roc::limiting_roc_highdim (cli: cdf --regime limit)"
                    .into(),
            ));
        }
        if !(c1 > 0.0 && c1 < 1.0) || !(c2 > 0.0 && c2 < 1.0) {
            return Err(Error::Domain(format!("need 0 < c1, c2 < 1 (got c1={c1}, c2={c2})")));
        }
        if !(gamma >= 0.0 && gamma.is_finite()) {
            return Err(Error::Domain(format!("gamma must be finite and >= 0, got {gamma}")));
        }
        Ok(Self { c1, c2, gamma })
    }

    /// Ratios taken from finite dimensions, `c1 = m/p`, `c2 = m/n`.
    pub fn from_dims(m: usize, n: usize, p: usize, gamma: f64) -> Result<Self> {
        Self::new(m as f64 / p as f64, m as f64 / n as f64, gamma)
    }

    pub fn c1(&self) -> f64 {
        self.c1
    }
    pub fn c2(&self) -> f64 {
        self.c2
    }
    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn with_gamma(&self, gamma: f64) -> Result<Self> {
        Self::new(self.c1, self.c2, gamma)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EdgeConstants {
    pub r: f64,
    pub mu: f64,
    pub sigma0: f64,
    pub gamma_p: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpikeConstants {
    pub xi: f64,
    pub sigma1: f64,
    pub tsq: f64,
}

pub fn edge_constants(params: SpectrumParams) -> EdgeConstants {
    let (c1, c2) = (params.c1, params.c2);
    let r = (c1 + c2 - c1 * c2).sqrt();
    let mu = ((1.0 + r) / (1.0 - c2)).powi(2);
    let den = r * ((c1 + c2).powi(2) - c2 * (c1 + r).powi(2)).powi(4);
    let num = c1.powi(4) * (c1 + r).powi(4) * (c1 + c2).powi(4);
    let ln_cube = num.ln() - den.ln();
    debug_assert!(den > 0.0 && num > 0.0);
    EdgeConstants {
        r,
        mu,
        sigma0: (ln_cube / 3.0).exp(),
        gamma_p: (c2 + r) / (1.0 - c2),
    }
}

/// Spike constants; only defined strictly above the phase transition.
pub fn spike_constants(params: SpectrumParams) -> Result<SpikeConstants> {
    let edge = edge_constants(params);
    let (c1, c2, g) = (params.c1, params.c2, params.gamma);
    if g <= edge.gamma_p {
        return Err(Error::Regime(format!(
            "gamma = {g} is not above the phase transition gamma_p = {}; the spike is \
             absorbed by the bulk, use the Tracy-Widom branch",
            edge.gamma_p
        )));
    }
    let xi = (g + c1) * (1.0 + g) / (g - (1.0 + g) * c2);
    let tsq = c1 + c2 - c1 * (g * g - c1) / (1.0 + g).powi(2);
    let s1sq = tsq * g * g * (1.0 + g).powi(2) * (g * g - c2 * (1.0 + g).powi(2) - c1)
        / (c2 - g + c2 * g).powi(4);
    if !(s1sq > 0.0) || !(xi > edge.mu) {
        return Err(Error::Regime(format!(
            "degenerate spike constants at gamma = {g} (sigma1^2 = {s1sq}, xi = {xi}, mu = {})",
            edge.mu
        )));
    }
    Ok(SpikeConstants {
        xi,
        sigma1: s1sq.sqrt(),
        tsq,
    })
}

fn check_m(m: usize) -> Result<f64> {
    if m == 0 {
        return Err(Error::InvalidDims("m must be positive".into()));
    }
    Ok(m as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Branch {
    Sub,
    Super,
}

fn branch(params: SpectrumParams) -> Result<Branch> {
    let gp = edge_constants(params).gamma_p;
    if params.gamma == gp {
        return Err(Error::Regime(format!(
            "gamma = gamma_p = {gp} is the critical point; no limit law is available there"
        )));
    }
    Ok(if params.gamma < gp { Branch::Sub } else { Branch::Super })
}

/// `m^{2/3} (lambda_hat - mu) / sigma0`.
pub fn centered_statistic(params: SpectrumParams, m: usize, lambda_hat: f64) -> Result<f64> {
    let m = check_m(m)?;
    let e = edge_constants(params);
    Ok(m.powf(2.0 / 3.0) * (lambda_hat - e.mu) / e.sigma0)
}

/// Inverse of [`centered_statistic`].
pub fn uncentered_statistic(params: SpectrumParams, m: usize, t: f64) -> Result<f64> {
    let m = check_m(m)?;
    let e = edge_constants(params);
    Ok(e.mu + t * e.sigma0 / m.powf(2.0 / 3.0))
}

/// `F2((x - mu) m^{2/3} / sigma0)`.
pub fn null_cdf_approx(params: SpectrumParams, m: usize, x: f64) -> Result<f64> {
    Ok(tw2_cdf(centered_statistic(params, m, x)?))
}

/// Gaussian law around `xi` above the transition, the null law below it.
pub fn alt_cdf_approx(params: SpectrumParams, m: usize, x: f64) -> Result<f64> {
    let mf = check_m(m)?;
    match branch(params)? {
        Branch::Sub => null_cdf_approx(params, m, x),
        Branch::Super => {
            let s = spike_constants(params)?;
            Ok(normal_cdf((x - s.xi) * mf.sqrt() / s.sigma1))
        }
    }
}

/// Threshold on the `lambda_hat` scale for false-alarm rate `pf`.
pub fn asympt_threshold(params: SpectrumParams, m: usize, pf: f64) -> Result<f64> {
    if !(pf > 0.0 && pf < 1.0) {
        return Err(Error::Domain(format!("pf must lie in (0,1), got {pf}")));
    }
    uncentered_statistic(params, m, tw2_quantile(1.0 - pf)?)
}

/// Asymptotic detection probability at false-alarm rate `pf`.
pub fn asympt_power(params: SpectrumParams, m: usize, pf: f64) -> Result<f64> {
    if !(pf > 0.0 && pf < 1.0) {
        return Err(Error::Domain(format!("pf must lie in (0,1), got {pf}")));
    }
    let mf = check_m(m)?;
    match branch(params)? {
        Branch::Sub => Ok(pf),
        Branch::Super => {
            let e = edge_constants(params);
            let s = spike_constants(params)?;
            let t_th = tw2_quantile(1.0 - pf)?;
            let arg = (e.sigma0 * t_th - mf.powf(2.0 / 3.0) * (s.xi - e.mu)) / (mf.powf(1.0 / 6.0) * s.sigma1);
            Ok(gaussian_q(arg))
        }
    }
}
