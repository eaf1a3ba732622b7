use std::sync::OnceLock;

/// A real number stored as `sign * exp(ln_abs)`.
///
/// `sign == 0` encodes an exact zero; `ln_abs` is then `-inf`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogSigned {
    pub sign: i8,
    pub ln_abs: f64,
}

impl LogSigned {
    pub const ZERO: LogSigned = LogSigned {
        sign: 0,
        ln_abs: f64::NEG_INFINITY,
    };
    pub const ONE: LogSigned = LogSigned {
        sign: 1,
        ln_abs: 0.0,
    };

    pub fn new(sign: i8, ln_abs: f64) -> Self {
        if sign == 0 {
            Self::ZERO
        } else {
            Self {
                sign: sign.signum(),
                ln_abs,
            }
        }
    }

    pub fn from_f64(x: f64) -> Self {
        if x == 0.0 {
            Self::ZERO
        } else {
            Self {
                sign: if x > 0.0 { 1 } else { -1 },
                ln_abs: x.abs().ln(),
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.sign == 0
    }

    pub fn to_f64(self) -> f64 {
        if self.sign == 0 {
            0.0
        } else {
            f64::from(self.sign) * self.ln_abs.exp()
        }
    }

    pub fn mul(self, other: Self) -> Self {
        if self.sign == 0 || other.sign == 0 {
            Self::ZERO
        } else {
            Self {
                sign: self.sign * other.sign,
                ln_abs: self.ln_abs + other.ln_abs,
            }
        }
    }

    pub fn div(self, other: Self) -> Self {
        assert!(other.sign != 0, "division by an exact zero");
        if self.sign == 0 {
            Self::ZERO
        } else {
            Self {
                sign: self.sign * other.sign,
                ln_abs: self.ln_abs - other.ln_abs,
            }
        }
    }

    /// Sums the terms without leaving the log domain.
    pub fn sum<I: IntoIterator<Item = LogSigned>>(terms: I) -> Self {
        let terms: Vec<LogSigned> = terms.into_iter().filter(|t| !t.is_zero()).collect();
        let Some(max) = terms
            .iter()
            .map(|t| t.ln_abs)
            .max_by(|a, b| a.total_cmp(b))
        else {
            return Self::ZERO;
        };
        let acc: f64 = terms
            .iter()
            .map(|t| f64::from(t.sign) * (t.ln_abs - max).exp())
            .sum();
        let mut out = Self::from_f64(acc);
        if !out.is_zero() {
            out.ln_abs += max;
        }
        out
    }
}

const EXACT_FACTORIALS: usize = 171;

fn factorial_table() -> &'static [f64; EXACT_FACTORIALS] {
    static TABLE: OnceLock<[f64; EXACT_FACTORIALS]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut out = [0.0; EXACT_FACTORIALS];
        let mut f = 1.0f64;
        for (n, slot) in out.iter_mut().enumerate() {
            if n > 0 {
                f *= n as f64;
            }
            *slot = f.ln();
        }
        out
    })
}

/// `ln(n!)`.
pub fn ln_factorial(n: u64) -> f64 {
    if (n as usize) < EXACT_FACTORIALS {
        factorial_table()[n as usize]
    } else {
        libm::lgamma(n as f64 + 1.0)
    }
}

// Up to this many factors the rising product is summed term by term.
const DIRECT_TERMS: u64 = 64;

/// Pochhammer symbol `(a)_k = a (a+1) ... (a+k-1)` in signed log form.
///
/// For a non-positive integer `a = -n` the falling-factorial rule applies:
/// `(-n)_k = (-1)^k n!/(n-k)!` for `k <= n` and zero beyond.
pub fn log_pochhammer(a: f64, k: u64) -> LogSigned {
    if k == 0 {
        return LogSigned::ONE;
    }
    if a <= 0.0 && a.fract() == 0.0 {
        let n = (-a) as u64;
        if k > n {
            return LogSigned::ZERO;
        }
        let sign = if k % 2 == 0 { 1 } else { -1 };
        return LogSigned::new(sign, ln_factorial(n) - ln_factorial(n - k));
    }
    if a > 0.0 && k > DIRECT_TERMS {
        return LogSigned::new(1, libm::lgamma(a + k as f64) - libm::lgamma(a));
    }
    let mut sign = 1i8;
    let mut ln_abs = 0.0;
    for i in 0..k {
        let f = a + i as f64;
        if f < 0.0 {
            sign = -sign;
        }
        ln_abs += f.abs().ln();
    }
    LogSigned::new(sign, ln_abs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn empty_product_is_one() {
        assert_eq!(log_pochhammer(3.0, 0), LogSigned::ONE);
        assert_eq!(log_pochhammer(-4.0, 0), LogSigned::ONE);
    }

    #[test]
    fn negative_integer_vanishes_past_n() {
        assert!(log_pochhammer(-4.0, 5).is_zero());
        assert!(log_pochhammer(-4.0, 9).is_zero());
        assert!(!log_pochhammer(-4.0, 4).is_zero());
    }

    #[test]
    fn negative_integer_falling_branch() {
        // (-4)(-3) = 12
        let v = log_pochhammer(-4.0, 2);
        assert_eq!(v.sign, 1);
        assert_relative_eq!(v.ln_abs, 12f64.ln(), epsilon = 1e-14);
        // (-4)(-3)(-2) = -24
        let v = log_pochhammer(-4.0, 3);
        assert_eq!(v.sign, -1);
        assert_relative_eq!(v.to_f64(), -24.0, epsilon = 1e-12);
    }

    #[test]
    fn positive_matches_product() {
        assert_relative_eq!(log_pochhammer(2.5, 3).to_f64(), 2.5 * 3.5 * 4.5, max_relative = 1e-14);
        // (1)_n = n!
        assert_relative_eq!(log_pochhammer(1.0, 100).ln_abs, ln_factorial(100), max_relative = 1e-13);
    }

    #[test]
    fn non_integer_negative_base() {
        // (-1.5)(-0.5)(0.5) = 0.375
        assert_relative_eq!(log_pochhammer(-1.5, 3).to_f64(), 0.375, max_relative = 1e-14);
    }

    #[test]
    fn ln_factorial_crosses_table_edge() {
        let a = ln_factorial(170) + (171f64).ln();
        assert_relative_eq!(ln_factorial(171), a, max_relative = 1e-14);
    }

    #[test]
    fn signed_sum_cancels() {
        let s = LogSigned::sum([LogSigned::from_f64(3.0), LogSigned::from_f64(-3.0)]);
        assert!(s.is_zero());
        let s = LogSigned::sum([LogSigned::new(1, 800.0), LogSigned::new(-1, 799.0)]);
        assert_relative_eq!(s.ln_abs, 800.0 + (1.0 - (-1f64).exp()).ln(), max_relative = 1e-14);
    }

    proptest! {
        #[test]
        fn pochhammer_additivity(a in 0.1f64..300.0, j in 0u64..150, k in 0u64..150) {
            let whole = log_pochhammer(a, j + k);
            let split = log_pochhammer(a, j).mul(log_pochhammer(a + j as f64, k));
            prop_assert_eq!(whole.sign, split.sign);
            let tol = 1e-12 * whole.ln_abs.abs().max(1.0);
            prop_assert!((whole.ln_abs - split.ln_abs).abs() <= tol);
        }

        #[test]
        fn pochhammer_additivity_negative_integers(n in 0u64..40, j in 0u64..50, k in 0u64..50) {
            let a = -(n as f64);
            let whole = log_pochhammer(a, j + k);
            let split = log_pochhammer(a, j).mul(log_pochhammer(a + j as f64, k));
            prop_assert_eq!(whole.sign, split.sign);
            if !whole.is_zero() {
                prop_assert!((whole.ln_abs - split.ln_abs).abs() <= 1e-12 * whole.ln_abs.abs().max(1.0));
            }
        }
    }
}
