//! The matrix integral
//!
//! ```text
//! I(z) = int_{0 < Y < I} det^beta[Y] det^alpha[I - zY] tr^nu(AY) dY,   A = a u u^H,
//! ```
//!
//! in closed form as an `(alpha+1) x (alpha+1)` determinant, and the series
//! identity that ties it back to the exact largest-eigenvalue CDF.

use serde::{Deserialize, Serialize};

use crate::det::log_det;
use crate::error::{Error, Result};
use crate::exactcdf::{cdf_lambda_max, ln_k_const, psi_row, ModelDims, Noncentrality};
use crate::specfun::{ln_factorial, log_pochhammer, LogSigned};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MatIntParams {
    pub alpha: usize,
    pub beta: usize,
    pub nu: usize,
    pub m: usize,
    pub a: f64,
    pub z: f64,
}

impl MatIntParams {
    pub fn new(alpha: usize, beta: usize, nu: usize, m: usize, a: f64, z: f64) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidDims("m must be positive".into()));
        }
        if !(a > 0.0 && a.is_finite()) {
            return Err(Error::Domain(format!("a must be positive, got {a}")));
        }
        if !(z > 0.0 && z < 1.0) {
            return Err(Error::Domain(format!("z must lie in (0,1), got {z}")));
        }
        Ok(Self {
            alpha,
            beta,
            nu,
            m,
            a,
            z,
        })
    }
}

fn lf(n: usize) -> f64 {
    ln_factorial(n as u64)
}

/// `ln K_d(m,n,p)`, `K_d = pi^{-m(m-1)/2} prod_k (p+n-k)! / ((p-k)! (n-k)!)`.
pub fn log_kd(m: usize, n: usize, p: usize) -> Result<f64> {
    if m == 0 || n < m || p < m {
        return Err(Error::InvalidDims(format!(
            "need 1 <= m <= n, p (got m={m}, n={n}, p={p})"
        )));
    }
    let prod: f64 = (1..=m).map(|k| lf(p + n - k) - lf(p - k) - lf(n - k)).sum();
    Ok(prod - (m * (m - 1)) as f64 / 2.0 * std::f64::consts::PI.ln())
}

fn zeta_log(i: usize, alpha: usize, beta: usize, nu: usize, m: usize) -> LogSigned {
    let sign_i: i8 = if i % 2 == 0 { 1 } else { -1 };
    LogSigned::sum((0..=alpha.min(nu)).map(|l| {
        let poch = log_pochhammer(-(l as f64) - 1.0, i as u64);
        if poch.is_zero() {
            return LogSigned::ZERO;
        }
        let ln_rest = lf(nu) + lf(alpha + 1 - i) + lf(alpha + beta + 2 * m + i - 2)
            - lf(nu - l)
            - lf(l + 1)
            - lf(alpha - l)
            - lf(l + beta + 2 * m + i - 2);
        LogSigned::new(sign_i, ln_rest).mul(poch)
    }))
}

/// First-column coefficient `zeta_i`, `1 <= i <= alpha + 1`.
pub fn zeta(i: usize, params: MatIntParams) -> Result<f64> {
    if i == 0 || i > params.alpha + 1 {
        return Err(Error::IndexOutOfRange {
            index: i,
            max: params.alpha + 1,
        });
    }
    Ok(zeta_log(i, params.alpha, params.beta, params.nu, params.m).to_f64())
}

fn log_matrix_integral(params: MatIntParams) -> Result<LogSigned> {
    let MatIntParams {
        alpha,
        beta,
        nu,
        m,
        a,
        z,
    } = params;
    let t = z / (1.0 - z);
    let rows: Vec<Vec<LogSigned>> = (1..=alpha + 1)
        .map(|i| {
            let mut row = vec![zeta_log(i, alpha, beta, nu, m)];
            row.extend(psi_row(i, alpha, beta, m, t));
            row
        })
        .collect();
    let det = log_det(&rows);
    let ln_pre = ln_k_const(alpha, beta, m) + log_pochhammer((m + beta) as f64, nu as u64).ln_abs
        - log_kd(m, m + alpha, m + beta)?
        - log_pochhammer((alpha + beta + 2 * m) as f64, nu as u64).ln_abs
        + nu as f64 * a.ln()
        + (m * alpha) as f64 * z.ln();
    if !det.ln_abs.is_finite() && !det.is_zero() {
        return Err(Error::NumericRange(format!("matrix integral overflowed at {params:?}")));
    }
    Ok(LogSigned {
        sign: det.sign,
        ln_abs: det.ln_abs + ln_pre,
    })
}

/// Closed-form value of the integral.
pub fn matrix_integral(params: MatIntParams) -> Result<f64> {
    let v = log_matrix_integral(params)?.to_f64();
    if !v.is_finite() {
        return Err(Error::NumericRange(format!("matrix integral overflowed at {params:?}")));
    }
    Ok(v)
}

fn series_term(dims: ModelDims, ln_head: f64, omega_a: f64, z: f64, nu: usize) -> Result<f64> {
    let (m, n, p) = (dims.m(), dims.n(), dims.p());
    if nu > 0 && omega_a == 0.0 {
        return Ok(0.0);
    }
    let params = MatIntParams::new(n - m, p - m, nu, m, 1.0, z)?;
    let integral = log_matrix_integral(params)?;
    let ln_coef = log_pochhammer((n + p) as f64, nu as u64).ln_abs
        - log_pochhammer(p as f64, nu as u64).ln_abs
        - lf(nu)
        + if nu == 0 { 0.0 } else { nu as f64 * (z * omega_a).ln() };
    Ok(f64::from(integral.sign) * (ln_head + ln_coef + integral.ln_abs).exp())
}

fn series_head(dims: ModelDims, omega_a: f64, z: f64) -> Result<f64> {
    if dims.is_singular() {
        return Err(Error::InvalidDims(format!("{dims} is singular (p < m)")));
    }
    Noncentrality::new(omega_a)?;
    if !(z > 0.0 && z < 1.0) {
        return Err(Error::Domain(format!("z must lie in (0,1), got {z}")));
    }
    Ok(log_kd(dims.m(), dims.n(), dims.p())? - omega_a + (dims.m() * dims.p()) as f64 * z.ln())
}

/// CDF of `v_max = lambda_max / (1 + lambda_max)` at `z` as the power series
/// in `omega_a` built from matrix integrals. Stops once past the peak term
/// and the next term is below `1e-14` of the sum, or after `max_terms`.
/// Returns the value and the number of terms used.
pub fn series_cdf(dims: ModelDims, omega_a: f64, z: f64, max_terms: usize) -> Result<(f64, usize)> {
    let head = series_head(dims, omega_a, z)?;
    let hump = std::f64::consts::E * omega_a * z * (dims.n() + dims.p()) as f64 / dims.p() as f64;
    if omega_a == 0.0 {
        return Ok((series_term(dims, head, 0.0, z, 0)?, 1));
    }
    let mut sum = 0.0;
    for nu in 0..max_terms.max(1) {
        let term = series_term(dims, head, omega_a, z, nu)?;
        sum += term;
        if nu as f64 > hump && term.abs() <= 1e-14 * sum.abs() {
            return Ok((sum, nu + 1));
        }
    }
    Ok((sum, max_terms.max(1)))
}

/// `|sum_{nu < truncation} term_nu - F(z/(1-z); omega_a)|`.
pub fn series_consistency_residual(
    dims: ModelDims,
    omega_a: f64,
    z: f64,
    truncation: usize,
) -> Result<f64> {
    if truncation == 0 {
        return Err(Error::Domain("truncation must be >= 1".into()));
    }
    let head = series_head(dims, omega_a, z)?;
    let mut sum = 0.0;
    for nu in 0..truncation {
        sum += series_term(dims, head, omega_a, z, nu)?;
    }
    let exact = cdf_lambda_max(dims, omega_a, z / (1.0 - z))?;
    Ok((sum - exact).abs())
}
