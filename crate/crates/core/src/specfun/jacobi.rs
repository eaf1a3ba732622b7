use super::pochhammer::log_pochhammer;

/// Degree and (non-negative integer) parameters of `P_n^{(a,b)}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct JacobiParams {
    pub degree: usize,
    pub a: u32,
    pub b: u32,
}

impl JacobiParams {
    pub fn new(degree: usize, a: u32, b: u32) -> Self {
        Self { degree, a, b }
    }
}

// Rescale the recurrence once the iterate grows past this.
const RESCALE_ABOVE: f64 = 1e150;

/// Jacobi polynomial evaluated by the three-term recurrence, returned as
/// `(mantissa, ln_scale)` with value `mantissa * exp(ln_scale)`.
///
/// The recurrence never overflows: both iterates are renormalised whenever
/// they grow large, which matters for `x = 2/t + 1` with small `t`.
pub fn jacobi_eval_scaled(params: JacobiParams, x: f64) -> (f64, f64) {
    let n = params.degree;
    let a = f64::from(params.a);
    let b = f64::from(params.b);
    let p0 = 1.0;
    if n == 0 {
        return (p0, 0.0);
    }
    let p1 = (a + 1.0) + 0.5 * (a + b + 2.0) * (x - 1.0);
    if n == 1 {
        return (p1, 0.0);
    }
    let (mut prev, mut cur) = (p0, p1);
    let mut ln_scale = 0.0;
    for k in 2..=n {
        let k = k as f64;
        let s = 2.0 * k + a + b;
        let c0 = 2.0 * k * (k + a + b) * (s - 2.0);
        let c1 = (s - 1.0) * (s * (s - 2.0) * x + a * a - b * b);
        let c2 = 2.0 * (k + a - 1.0) * (k + b - 1.0) * s;
        let next = (c1 * cur - c2 * prev) / c0;
        prev = cur;
        cur = next;
        let big = cur.abs().max(prev.abs());
        if big > RESCALE_ABOVE {
            prev /= big;
            cur /= big;
            ln_scale += big.ln();
        }
    }
    (cur, ln_scale)
}

/// `P_n^{(a,b)}(x)`. Overflows to infinity only when the value itself does.
pub fn jacobi_eval(params: JacobiParams, x: f64) -> f64 {
    let (m, s) = jacobi_eval_scaled(params, x);
    m * s.exp()
}

/// `k`-th derivative `2^{-k} (n+a+b+1)_k P_{n-k}^{(a+k,b+k)}(x)`; zero once
/// `k` exceeds the degree.
pub fn jacobi_derivative(params: JacobiParams, k: usize, x: f64) -> f64 {
    if k == 0 {
        return jacobi_eval(params, x);
    }
    if k > params.degree {
        return 0.0;
    }
    let JacobiParams { degree, a, b } = params;
    let prefactor = log_pochhammer(degree as f64 + f64::from(a) + f64::from(b) + 1.0, k as u64);
    let shifted = JacobiParams::new(degree - k, a + k as u32, b + k as u32);
    let (m, s) = jacobi_eval_scaled(shifted, x);
    m * (s + prefactor.ln_abs - k as f64 * std::f64::consts::LN_2).exp()
}
