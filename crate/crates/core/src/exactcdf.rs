//! Exact finite-dimensional law of the largest eigenvalue of a complex
//! non-central F-matrix with rank-one non-centrality.
//!
//! With `alpha = n - m` and `beta = p - m` the CDF is
//!
//! ```text
//! F(t; w) = K(alpha,beta,m) exp(-w/(1+t)) (t/(1+t))^{m(alpha+beta+m)} det[Phi_i | Psi_ij]
//! ```
//!
//! an `(alpha+1) x (alpha+1)` determinant whose first column carries all of
//! the dependence on `w`. Every factor is carried in signed log form and the
//! determinant is row-scaled, so moderate `m` with large `beta` stays finite.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::det::log_det_with_condition;
use crate::error::{Error, Result};
use crate::specfun::{jacobi_eval_scaled, ln_factorial, log_pochhammer, JacobiParams, LogSigned};

/// System dimension `m`, noise-only sample count `n`, signal sample count `p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ModelDims {
    m: usize,
    n: usize,
    p: usize,
}

impl ModelDims {
    /// Requires `m, n, p >= 1` and `n >= m`. `p < m` is allowed and selects
    /// the singular branch.
    pub fn new(m: usize, n: usize, p: usize) -> Result<Self> {
        if m == 0 || n == 0 || p == 0 {
            return Err(Error::InvalidDims(format!(
                "m, n, p must be positive (got m={m}, n={n}, p={p})"
            )));
        }
        if n < m {
            return Err(Error::InvalidDims(format!(
                "need n >= m for an invertible noise covariance estimate (got m={m}, n={n})"
            )));
        }
        Ok(Self { m, n, p })
    }

    pub fn m(&self) -> usize {
        self.m
    }
    pub fn n(&self) -> usize {
        self.n
    }
    pub fn p(&self) -> usize {
        self.p
    }

    /// `n - m`.
    pub fn alpha(&self) -> usize {
        self.n - self.m
    }

    /// `p - m`; negative on the singular branch.
    pub fn beta(&self) -> i64 {
        self.p as i64 - self.m as i64
    }

    pub fn is_singular(&self) -> bool {
        self.p < self.m
    }

    /// `c = p/n`, the factor between `lambda` and the test statistic
    /// `lambda_hat = lambda / c`.
    pub fn c(&self) -> f64 {
        self.p as f64 / self.n as f64
    }

    /// `m -> p`, `p -> m`, `n -> n + p - m`. An involution.
    pub fn relabel(&self) -> Self {
        Self {
            m: self.p,
            p: self.m,
            n: self.n + self.p - self.m,
        }
    }

    fn nonsingular_beta(&self) -> Result<usize> {
        if self.is_singular() {
            return Err(Error::InvalidDims(format!(
                "p < m (m={}, p={}); use the singular branch",
                self.m, self.p
            )));
        }
        Ok(self.p - self.m)
    }
}

impl std::fmt::Display for ModelDims {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(m={}, n={}, p={})", self.m, self.n, self.p)
    }
}

/// `omega = tr(Omega) >= 0`, the single non-centrality spike.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Noncentrality(f64);

impl Noncentrality {
    pub fn new(omega: f64) -> Result<Self> {
        if omega.is_finite() && omega >= 0.0 {
            Ok(Self(omega))
        } else {
            Err(Error::Domain(format!("omega must be finite and >= 0, got {omega}")))
        }
    }

    pub fn value(&self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for Noncentrality {
    type Error = Error;
    fn try_from(v: f64) -> Result<Self> {
        Self::new(v)
    }
}

impl From<Noncentrality> for f64 {
    fn from(w: Noncentrality) -> f64 {
        w.0
    }
}

/// One CDF evaluation with its scaling diagnostic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CdfEvaluation {
    pub t: f64,
    pub value: f64,
    /// `ln |det|` of the row-scaled determinant before the prefactors join.
    pub log_scale_used: f64,
    /// Componentwise condition number of the determinant.
    pub condition: f64,
}

/// Relative error of the determinant entries, in units of the condition.
const ENTRY_REL_ERROR: f64 = 256.0 * f64::EPSILON;
/// Largest estimated absolute error accepted before an evaluation is
/// reported as out of range.
pub const MAX_ABS_ERROR: f64 = 1e-6;

fn lf(n: usize) -> f64 {
    ln_factorial(n as u64)
}

/// `ln K(alpha, beta, m) = sum_{j<alpha} ln (beta+2m+j-1)! - ln (beta+2m+2j)!`.
pub(crate) fn ln_k_const(alpha: usize, beta: usize, m: usize) -> f64 {
    (0..alpha)
        .map(|j| lf(beta + 2 * m + j - 1) - lf(beta + 2 * m + 2 * j))
        .sum()
}

fn check_t(t: f64) -> Result<()> {
    if t.is_nan() || t < 0.0 {
        return Err(Error::Domain(format!("t must be > 0, got {t}")));
    }
    Ok(())
}

/// `ln(t/(1+t))`, accurate for large `t`.
fn ln_ratio(t: f64) -> f64 {
    -(1.0 / t).ln_1p()
}

fn phi_log(i: usize, alpha: usize, beta: usize, m: usize, t: f64, omega: f64) -> LogSigned {
    let top = alpha + 1 - i;
    let big = alpha + beta + 2 * m + i - 2;
    let w = omega * t / (1.0 + t);
    let ln_w = w.ln();
    LogSigned::sum((0..=top).map(|k| {
        let power = alpha - k;
        // 0^0 = 1 so the central case falls out of the same sum
        let ln_pow = if power == 0 {
            0.0
        } else if w == 0.0 {
            return LogSigned::ZERO;
        } else {
            power as f64 * ln_w
        };
        LogSigned::new(1, lf(top) + lf(big) - lf(k) - lf(top - k) - lf(big - k) + ln_pow)
    }))
}

fn psi_log(i: usize, j: usize, beta: usize, m: usize, x: f64) -> LogSigned {
    let degree = m as i64 + i as i64 - j as i64;
    if degree < 0 {
        return LogSigned::ZERO;
    }
    let pre = log_pochhammer((beta + m + i - 1) as f64, (j - 2) as u64);
    let (mant, ln_scale) = jacobi_eval_scaled(
        JacobiParams::new(degree as usize, (j - 2) as u32, (beta + j - 2) as u32),
        x,
    );
    let mut v = LogSigned::from_f64(mant);
    if !v.is_zero() {
        v.ln_abs += ln_scale;
    }
    pre.mul(v)
}

/// First-column entry `Phi_i^{(alpha)}(t, omega)`, `1 <= i <= alpha + 1`.
pub fn phi(i: usize, dims: ModelDims, t: f64, omega: f64) -> Result<f64> {
    let beta = dims.nonsingular_beta()?;
    let alpha = dims.alpha();
    if i == 0 || i > alpha + 1 {
        return Err(Error::IndexOutOfRange {
            index: i,
            max: alpha + 1,
        });
    }
    check_t(t)?;
    Noncentrality::new(omega)?;
    Ok(phi_log(i, alpha, beta, dims.m, t, omega).to_f64())
}

/// `Psi_{i,j}(t) = (beta+m+i-1)_{j-2} P_{m+i-j}^{(j-2, beta+j-2)}(2/t + 1)`
/// for `1 <= i <= alpha+1`, `2 <= j <= alpha+1`. A negative Jacobi degree
/// (possible once `alpha > m`) gives zero.
pub fn psi(i: usize, j: usize, dims: ModelDims, t: f64) -> Result<f64> {
    let beta = dims.nonsingular_beta()?;
    let alpha = dims.alpha();
    if i == 0 || i > alpha + 1 {
        return Err(Error::IndexOutOfRange {
            index: i,
            max: alpha + 1,
        });
    }
    if j < 2 || j > alpha + 1 {
        return Err(Error::IndexOutOfRange {
            index: j,
            max: alpha + 1,
        });
    }
    check_t(t)?;
    Ok(psi_log(i, j, beta, dims.m, 2.0 / t + 1.0).to_f64())
}

/// Row `i` of `[zeta_i | Psi_ij(arg)]`-type determinants, with the first
/// entry supplied by the caller.
pub(crate) fn psi_row(i: usize, alpha: usize, beta: usize, m: usize, t: f64) -> Vec<LogSigned> {
    let x = 2.0 / t + 1.0;
    (2..=alpha + 1).map(|j| psi_log(i, j, beta, m, x)).collect()
}

fn finish(ln_prefactor: f64, (det, condition): (LogSigned, f64), t: f64) -> Result<CdfEvaluation> {
    if det.is_zero() {
        return Ok(CdfEvaluation {
            t,
            value: 0.0,
            log_scale_used: f64::NEG_INFINITY,
            condition,
        });
    }
    let value = f64::from(det.sign) * (ln_prefactor + det.ln_abs).exp();
    if !value.is_finite() || !det.ln_abs.is_finite() {
        return Err(Error::NumericRange(format!(
            "determinant left the f64 range at t={t}; try --regime highdim"
        )));
    }
    if !(-1e-8..=1.0 + 1e-8).contains(&value) {
        return Err(Error::NumericRange(format!(
            "CDF evaluated to {value} at t={t}: cancellation exceeded f64 precision; try --regime highdim"
        )));
    }
    let err = value.abs() * condition * ENTRY_REL_ERROR;
    if err > MAX_ABS_ERROR {
        return Err(Error::NumericRange(format!(
            "determinant is ill-conditioned at t={t} (condition {condition:.1e}, estimated error {err:.1e}); \
             try --regime highdim"
        )));
    }
    Ok(CdfEvaluation {
        t,
        value: value.clamp(0.0, 1.0),
        log_scale_used: det.ln_abs,
        condition,
    })
}

/// Exact CDF with its determinant diagnostic. Requires `p >= m`.
pub fn cdf_lambda_max_eval(dims: ModelDims, omega: f64, t: f64) -> Result<CdfEvaluation> {
    let beta = dims.nonsingular_beta()?;
    let omega = Noncentrality::new(omega)?.value();
    check_t(t)?;
    if t == 0.0 {
        return Ok(CdfEvaluation {
            t,
            value: 0.0,
            log_scale_used: 0.0,
            condition: 1.0,
        });
    }
    if t == f64::INFINITY {
        return Ok(CdfEvaluation {
            t,
            value: 1.0,
            log_scale_used: 0.0,
            condition: 1.0,
        });
    }
    let alpha = dims.alpha();
    let m = dims.m;
    let rows: Vec<Vec<LogSigned>> = (1..=alpha + 1)
        .map(|i| {
            let mut row = Vec::with_capacity(alpha + 1);
            row.push(phi_log(i, alpha, beta, m, t, omega));
            row.extend(psi_row(i, alpha, beta, m, t));
            row
        })
        .collect();
    let det = log_det_with_condition(&rows);
    let ln_pre = ln_k_const(alpha, beta, m) - omega / (1.0 + t)
        + (m * (alpha + beta + m)) as f64 * ln_ratio(t);
    finish(ln_pre, det, t)
}

/// Exact `Pr{lambda_max <= t}` for the non-singular F-matrix (`p >= m`).
pub fn cdf_lambda_max(dims: ModelDims, omega: f64, t: f64) -> Result<f64> {
    cdf_lambda_max_eval(dims, omega, t).map(|e| e.value)
}

/// Closed form at `alpha = 0`: `exp(-w/(1+t)) (t/(1+t))^{m(beta+m)}`.
pub fn cdf_alpha0(m: usize, beta: usize, omega: f64, t: f64) -> Result<f64> {
    if m == 0 {
        return Err(Error::InvalidDims("m must be positive".into()));
    }
    let omega = Noncentrality::new(omega)?.value();
    check_t(t)?;
    if t == 0.0 {
        return Ok(0.0);
    }
    Ok((-omega / (1.0 + t) + (m * (beta + m)) as f64 * ln_ratio(t)).exp())
}

/// Central (`omega = 0`) CDF through the `alpha x alpha` determinant
/// `C(alpha,beta,m) (t/(1+t))^{m(alpha+beta+m)} det[Psi_{i+1,j+1}]`.
pub fn cdf_central(dims: ModelDims, t: f64) -> Result<f64> {
    let beta = dims.nonsingular_beta()?;
    check_t(t)?;
    if t == 0.0 {
        return Ok(0.0);
    }
    if t == f64::INFINITY {
        return Ok(1.0);
    }
    let alpha = dims.alpha();
    let m = dims.m;
    let rows: Vec<Vec<LogSigned>> = (2..=alpha + 1).map(|i| psi_row(i, alpha, beta, m, t)).collect();
    let det = log_det_with_condition(&rows);
    let ln_c = lf(alpha + beta + 2 * m - 1) - lf(beta + 2 * m - 1) + ln_k_const(alpha, beta, m);
    let ln_pre = ln_c + (m * (alpha + beta + m)) as f64 * ln_ratio(t);
    finish(ln_pre, det, t).map(|e| e.value)
}

/// CDF of the largest non-zero eigenvalue on the singular branch `p < m`,
/// through the relabelled non-singular law.
pub fn cdf_singular(dims: ModelDims, omega: f64, t: f64) -> Result<f64> {
    if !dims.is_singular() {
        return Err(Error::InvalidDims(format!(
            "{dims} is not singular (p >= m); use cdf_lambda_max"
        )));
    }
    cdf_lambda_max(dims.relabel(), omega, t)
}

/// Dispatches to the singular or non-singular branch.
pub fn cdf_any(dims: ModelDims, omega: f64, t: f64) -> Result<f64> {
    if dims.is_singular() {
        cdf_singular(dims, omega, t)
    } else {
        cdf_lambda_max(dims, omega, t)
    }
}

/// CDF of the test statistic `lambda_hat = lambda_max(Sigma_hat^{-1} R_hat)`,
/// i.e. the F-matrix law at `t = (p/n) x`.
pub fn cdf_test_statistic(dims: ModelDims, omega: f64, x: f64) -> Result<f64> {
    check_t(x)?;
    cdf_any(dims, omega, dims.c() * x)
}

/// Evaluates the CDF over a grid in parallel. `scaled` selects the
/// test-statistic scale.
pub fn cdf_grid(dims: ModelDims, omega: f64, ts: &[f64], scaled: bool) -> Result<Vec<f64>> {
    ts.par_iter()
        .map(|&t| {
            if scaled {
                cdf_test_statistic(dims, omega, t)
            } else {
                cdf_any(dims, omega, t)
            }
        })
        .collect()
}

const BRACKET_LO: f64 = 1e-12;
const BRACKET_HI: f64 = 1e12;

/// Inverse CDF. Returns `t` on the F-matrix scale, or `x = t/c` on the test
/// statistic scale when `scaled` is set.
pub fn quantile(dims: ModelDims, omega: f64, q: f64, scaled: bool) -> Result<f64> {
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::Domain(format!("quantile needs q in (0,1), got {q}")));
    }
    Noncentrality::new(omega)?;
    let f = |t: f64| cdf_any(dims, omega, t);
    let m = dims.m as f64;
    let start = (m * dims.p as f64 / (dims.n as f64 - m + 1.0)).clamp(1e-6, 1e6);
    let (mut lo, mut hi) = (start, start);
    while f(lo)? > q {
        lo /= 2.0;
        if lo < BRACKET_LO {
            return Err(Error::NumericRange(format!("could not bracket q={q} from below")));
        }
    }
    while f(hi)? < q {
        hi *= 2.0;
        if hi > BRACKET_HI {
            return Err(Error::NumericRange(format!("could not bracket q={q} from above")));
        }
    }
    // bisection in log t
    for _ in 0..200 {
        let mid = (lo * hi).sqrt();
        let v = f(mid)?;
        if v < q {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi / lo - 1.0 < 1e-15 || (v - q).abs() < 1e-13 {
            break;
        }
    }
    let t = (lo * hi).sqrt();
    Ok(if scaled { t / dims.c() } else { t })
}

/// How `omega` grows in the `m = n`, `m/p -> c1` limit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LimitRegime {
    /// `omega / p -> tau`
    Tau(f64),
    /// `omega / p^2 -> phi`
    Phi(f64),
}

/// Limiting CDF of `lambda_max / m^2` as `m = n`, `m/p -> c1`.
pub fn limiting_scaled_cdf(c1: f64, x: f64, regime: LimitRegime) -> Result<f64> {
    if !(c1 > 0.0 && c1 <= 1.0) {
        return Err(Error::Domain(format!("c1 must lie in (0,1], got {c1}")));
    }
    check_t(x)?;
    if x == 0.0 {
        return Ok(0.0);
    }
    match regime {
        LimitRegime::Tau(tau) => {
            Noncentrality::new(tau)?;
            Ok((-1.0 / (c1 * x)).exp())
        }
        LimitRegime::Phi(phi) => {
            Noncentrality::new(phi)?;
            Ok((-(phi + c1) / (c1 * c1 * x)).exp())
        }
    }
}
