//! False-alarm / detection probabilities and ROC curves for the test
//! `lambda_hat > xi_th`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactcdf::{cdf_test_statistic, quantile, ModelDims, Noncentrality};
use crate::report::csv_table;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RocPoint {
    pub pf: f64,
    pub pd: f64,
    /// Threshold on the `lambda_hat` scale.
    pub threshold: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RocCurve {
    pub dims: ModelDims,
    pub omega: f64,
    pub points: Vec<RocPoint>,
}

impl RocCurve {
    pub fn to_csv(&self) -> String {
        csv_table(
            &["pf", "pd", "threshold"],
            self.points.iter().map(|p| vec![p.pf, p.pd, p.threshold]),
        )
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("roc curve serializes")
    }

    /// Largest `|pd - other.pd|` over points with matching `pf`.
    pub fn sup_gap(&self, other: &RocCurve) -> f64 {
        self.points
            .iter()
            .zip(&other.points)
            .map(|(a, b)| (a.pd - b.pd).abs())
            .fold(0.0, f64::max)
    }
}

/// `||s||^2 = k p^epsilon`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingLaw {
    k: f64,
    epsilon: f64,
}

impl ScalingLaw {
    pub fn new(k: f64, epsilon: f64) -> Result<Self> {
        if !(k > 0.0 && k.is_finite()) || !(epsilon >= 0.0 && epsilon.is_finite()) {
            return Err(Error::Domain(format!(
                "scaling law needs k > 0 and epsilon >= 0 (got k={k}, epsilon={epsilon})"
            )));
        }
        Ok(Self { k, epsilon })
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// `omega = k p^epsilon a^H Sigma^{-1} a` given `quad = a^H Sigma^{-1} a`.
    pub fn omega(&self, p: usize, quad: f64) -> f64 {
        self.k * (p as f64).powf(self.epsilon) * quad
    }
}

fn check_pf(pf: f64) -> Result<()> {
    if (0.0..=1.0).contains(&pf) {
        Ok(())
    } else {
        Err(Error::Domain(format!("pf must lie in [0,1], got {pf}")))
    }
}

/// `(P_F, P_D)` of the test with threshold `xi_th` on the `lambda_hat` scale.
pub fn pf_pd_at_threshold(dims: ModelDims, omega: f64, xi_th: f64) -> Result<(f64, f64)> {
    Noncentrality::new(omega)?;
    if !(xi_th >= 0.0) {
        return Err(Error::Domain(format!("threshold must be >= 0, got {xi_th}")));
    }
    let pf = 1.0 - cdf_test_statistic(dims, 0.0, xi_th)?;
    let pd = 1.0 - cdf_test_statistic(dims, omega, xi_th)?;
    Ok((pf, pd))
}

/// `count` false-alarm rates equally spaced in `logit(pf)` over `[lo, hi]`.
pub fn logit_grid(lo: f64, hi: f64, count: usize) -> Result<Vec<f64>> {
    if !(0.0 < lo && lo < hi && hi < 1.0) || count < 2 {
        return Err(Error::Domain(format!(
            "logit grid needs 0 < lo < hi < 1 and count >= 2 (got {lo}, {hi}, {count})"
        )));
    }
    let logit = |p: f64| (p / (1.0 - p)).ln();
    let (a, b) = (logit(lo), logit(hi));
    Ok((0..count)
        .map(|i| {
            let u = a + (b - a) * i as f64 / (count - 1) as f64;
            1.0 / (1.0 + (-u).exp())
        })
        .collect())
}

/// The 199-point logit-spaced grid on `[1e-3, 1 - 1e-3]`.
pub fn default_pf_grid() -> Vec<f64> {
    logit_grid(1e-3, 1.0 - 1e-3, 199).expect("valid default grid")
}

fn check_grid(pf_grid: &[f64]) -> Result<()> {
    if pf_grid.iter().any(|&p| !(0.0..=1.0).contains(&p)) {
        return Err(Error::Domain("pf grid must lie in [0,1]".into()));
    }
    if pf_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Domain("pf grid must be strictly increasing".into()));
    }
    Ok(())
}

/// Exact ROC: the null quantile at `1 - pf` gives the threshold, the
/// non-central CDF gives `pd`. `pf = 0` and `pf = 1` map to the thresholds
/// `+inf` and `0`.
pub fn roc_curve(dims: ModelDims, omega: f64, pf_grid: &[f64]) -> Result<RocCurve> {
    Noncentrality::new(omega)?;
    check_grid(pf_grid)?;
    let points = pf_grid
        .par_iter()
        .map(|&pf| {
            if pf == 0.0 || pf == 1.0 {
                let threshold = if pf == 0.0 { f64::INFINITY } else { 0.0 };
                return Ok(RocPoint { pf, pd: pf, threshold });
            }
            let threshold = quantile(dims, 0.0, 1.0 - pf, true)?;
            let pd = if omega == 0.0 {
                pf
            } else {
                1.0 - cdf_test_statistic(dims, omega, threshold)?
            };
            Ok(RocPoint { pf, pd, threshold })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RocCurve {
        dims,
        omega,
        points,
    })
}

/// Closed-form ROC at `n = m`:
/// `pd = 1 - (1-pf) exp{-omega (1 - (1-pf)^{1/(m(beta+m))})}`.
pub fn roc_alpha0_closed(m: usize, beta: usize, omega: f64, pf: f64) -> Result<f64> {
    if m == 0 {
        return Err(Error::InvalidDims("m must be positive".into()));
    }
    Noncentrality::new(omega)?;
    check_pf(pf)?;
    if pf == 0.0 || pf == 1.0 || omega == 0.0 {
        return Ok(pf);
    }
    let q = 1.0 - pf;
    let inner = -(q.ln() / (m * (beta + m)) as f64).exp_m1();
    Ok(1.0 - q * (-omega * inner).exp())
}

/// Limit of the ROC as `p -> infinity` at fixed `m`, with
/// `gamma_quad = k a^H Sigma^{-1} a`.
pub fn limiting_roc_fixed_m(m: usize, law: ScalingLaw, gamma_quad: f64, pf: f64) -> Result<f64> {
    if m == 0 {
        return Err(Error::InvalidDims("m must be positive".into()));
    }
    Noncentrality::new(gamma_quad)?;
    check_pf(pf)?;
    Ok(piecewise_limit(law.epsilon, 1.0, 1.0 + gamma_quad / m as f64, pf))
}

/// Limit of the ROC as `m = n`, `m/p -> c1`; the critical growth is `p^2`.
pub fn limiting_roc_highdim(c1: f64, law: ScalingLaw, gamma_quad: f64, pf: f64) -> Result<f64> {
    if !(c1 > 0.0 && c1 < 1.0) {
        return Err(Error::Domain(format!("c1 must lie in (0,1), got {c1}")));
    }
    Noncentrality::new(gamma_quad)?;
    check_pf(pf)?;
    Ok(piecewise_limit(law.epsilon, 2.0, 1.0 + gamma_quad / c1, pf))
}

fn piecewise_limit(epsilon: f64, critical: f64, exponent: f64, pf: f64) -> f64 {
    if epsilon < critical {
        pf
    } else if epsilon == critical {
        1.0 - (1.0 - pf).powf(exponent)
    } else if pf > 0.0 {
        1.0
    } else {
        0.0
    }
}

/// `(lower, upper)` bounds on the critical-growth limiting power in terms of
/// `||Sigma||_2` and `||Sigma^{-1}||_2`. `m_or_c1` is `m` for fixed `m` and
/// `c1` in the `m = n` high-dimensional regime.
pub fn roc_power_bounds(
    pf: f64,
    k: f64,
    m_or_c1: f64,
    sigma_norm: f64,
    sigma_inv_norm: f64,
) -> Result<(f64, f64)> {
    check_pf(pf)?;
    if !(k > 0.0 && m_or_c1 > 0.0 && sigma_norm > 0.0 && sigma_inv_norm > 0.0) {
        return Err(Error::Domain("k, m, and both norms must be positive".into()));
    }
    // ||Sigma^{-1}|| = 1/lambda_min >= 1/lambda_max = 1/||Sigma||
    if sigma_inv_norm * sigma_norm < 1.0 - 1e-12 {
        return Err(Error::Domain(format!(
            "inconsistent norms: ||Sigma|| * ||Sigma^-1|| = {} < 1",
            sigma_inv_norm * sigma_norm
        )));
    }
    let q = 1.0 - pf;
    let lower = 1.0 - q.powf(1.0 + k / (m_or_c1 * sigma_norm));
    let upper = 1.0 - q.powf(1.0 + k * sigma_inv_norm / m_or_c1);
    Ok((lower, upper))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn d(m: usize, n: usize, p: usize) -> ModelDims {
        ModelDims::new(m, n, p).unwrap()
    }

    #[test]
    fn null_threshold_gives_equal_rates() {
        for xi in [0.3, 1.0, 4.0] {
            let (pf, pd) = pf_pd_at_threshold(d(3, 5, 6), 0.0, xi).unwrap();
            assert_eq!(pf, pd);
        }
        let (pf, pd) = pf_pd_at_threshold(d(3, 5, 6), 2.0, 1e9).unwrap();
        assert!(pf < 1e-12 && pd < 1e-12);
        let (pf, pd) = pf_pd_at_threshold(d(3, 5, 6), 2.0, 1e-9).unwrap();
        assert!(pf > 1.0 - 1e-12 && pd > 1.0 - 1e-12);
    }

    #[test]
    fn quantile_threshold_hits_pf() {
        let dims = d(4, 8, 10);
        let th = quantile(dims, 0.0, 0.95, true).unwrap();
        let (pf, pd) = pf_pd_at_threshold(dims, 5.0, th).unwrap();
        assert!((pf - 0.05).abs() < 1e-9);
        assert!(pd > pf);
    }

    #[test]
    fn logit_grid_shape() {
        let g = default_pf_grid();
        assert_eq!(g.len(), 199);
        assert!((g[99] - 0.5).abs() < 1e-15);
        assert!(g.windows(2).all(|w| w[1] > w[0]));
        assert_relative_eq!(g[0], 1e-3, max_relative = 1e-12);
        assert!(logit_grid(0.0, 0.5, 10).is_err());
    }

    #[test]
    fn diagonal_at_zero_omega() {
        let c = roc_curve(d(3, 4, 5), 0.0, &[0.1, 0.5, 0.9]).unwrap();
        for p in &c.points {
            assert!((p.pd - p.pf).abs() < 1e-9);
        }
        assert!(roc_curve(d(3, 4, 5), 1.0, &[0.5, 0.1]).is_err());
    }

    #[test]
    fn ordered_in_omega() {
        let grid = logit_grid(0.01, 0.99, 15).unwrap();
        let lo = roc_curve(d(4, 8, 10), 1.0, &grid).unwrap();
        let hi = roc_curve(d(4, 8, 10), 3.0, &grid).unwrap();
        for (a, b) in lo.points.iter().zip(&hi.points) {
            assert!(b.pd >= a.pd - 1e-10);
            assert!(a.pd >= a.pf);
        }
    }

    #[test]
    fn alpha0_closed_form() {
        assert_eq!(roc_alpha0_closed(3, 2, 1.0, 0.0).unwrap(), 0.0);
        assert_eq!(roc_alpha0_closed(3, 2, 1.0, 1.0).unwrap(), 1.0);
        assert_eq!(roc_alpha0_closed(3, 2, 0.0, 0.3).unwrap(), 0.3);
        let v = roc_alpha0_closed(8, 0, 2.0, 0.1).unwrap();
        let direct = 1.0 - 0.9 * (-2.0 * (1.0 - 0.9f64.powf(1.0 / 64.0))).exp();
        assert_relative_eq!(v, direct, max_relative = 1e-13);
        let c = roc_curve(d(8, 8, 8), 2.0, &[0.1]).unwrap();
        assert!((c.points[0].pd - v).abs() < 1e-9);
    }

    #[test]
    fn fixed_m_limit_cases() {
        let pf = 0.2;
        assert_eq!(limiting_roc_fixed_m(4, ScalingLaw::new(1.0, 0.5).unwrap(), 1.0, pf).unwrap(), pf);
        let v = limiting_roc_fixed_m(4, ScalingLaw::new(1.0, 1.0).unwrap(), 1.0, pf).unwrap();
        assert_relative_eq!(v, 1.0 - 0.8f64.powf(1.25), max_relative = 1e-15);
        assert_eq!(limiting_roc_fixed_m(4, ScalingLaw::new(1.0, 2.0).unwrap(), 1.0, 0.1).unwrap(), 1.0);
    }

    #[test]
    fn highdim_limit_cases() {
        let law = |e| ScalingLaw::new(1.0, e).unwrap();
        assert_eq!(limiting_roc_highdim(0.5, law(1.0), 0.5, 0.3).unwrap(), 0.3);
        let v = limiting_roc_highdim(0.5, law(2.0), 0.5, 0.3).unwrap();
        assert_relative_eq!(v, 1.0 - 0.7f64.powi(2), max_relative = 1e-15);
        assert_eq!(limiting_roc_highdim(0.5, law(3.0), 0.5, 0.3).unwrap(), 1.0);
        assert!(limiting_roc_highdim(1.0, law(2.0), 0.5, 0.3).is_err());
    }

    #[test]
    fn power_bounds() {
        let (lo, hi) = roc_power_bounds(0.2, 1.0, 4.0, 2.0, 2.0).unwrap();
        assert_relative_eq!(lo, 1.0 - 0.8f64.powf(9.0 / 8.0), max_relative = 1e-15);
        assert_relative_eq!(hi, 1.0 - 0.8f64.powf(1.5), max_relative = 1e-15);
        let (lo, hi) = roc_power_bounds(0.2, 1.0, 4.0, 1.0, 1.0).unwrap();
        assert_eq!(lo, hi);
        assert!(roc_power_bounds(0.2, 1.0, 4.0, 2.0, 0.1).is_err());
        assert!(ScalingLaw::new(0.0, 1.0).is_err());
    }

    #[test]
    fn csv_and_json_export() {
        let c = roc_curve(d(2, 3, 3), 1.0, &[0.2, 0.4]).unwrap();
        let csv = c.to_csv();
        assert!(csv.starts_with("pf,pd,threshold\n"));
        assert_eq!(csv.lines().count(), 3);
        let back: RocCurve = serde_json::from_str(&c.to_json()).unwrap();
        assert_eq!(back, c);
    }
}
