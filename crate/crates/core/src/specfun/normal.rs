use std::f64::consts::FRAC_1_SQRT_2;

/// Gaussian tail `Q(x) = 1 - Phi(x)`, through `erfc` so the upper tail keeps
/// full relative precision.
pub fn gaussian_q(x: f64) -> f64 {
    0.5 * libm::erfc(x * FRAC_1_SQRT_2)
}

/// Standard normal CDF.
pub fn normal_cdf(x: f64) -> f64 {
    gaussian_q(-x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    // Maclaurin series of erf, fine for |x| <= 3.
    fn q_series(x: f64) -> f64 {
        let z = x * FRAC_1_SQRT_2;
        let mut term = z;
        let mut sum = z;
        for n in 1..200 {
            term *= -z * z / n as f64;
            sum += term / (2 * n + 1) as f64;
        }
        0.5 - sum / std::f64::consts::PI.sqrt()
    }

    #[test]
    fn q_at_zero_is_half() {
        assert_eq!(gaussian_q(0.0), 0.5);
    }

    #[test]
    fn q_at_one() {
        assert!((gaussian_q(1.0) - 0.158655).abs() < 1e-6);
        assert_relative_eq!(gaussian_q(1.0), q_series(1.0), max_relative = 1e-13);
    }

    #[test]
    fn q_matches_series() {
        for i in -30..=30 {
            let x = i as f64 / 10.0;
            assert!((gaussian_q(x) - q_series(x)).abs() < 1e-14);
        }
    }

    #[test]
    fn far_tail_underflows() {
        assert!(gaussian_q(40.0) < 1e-300);
        assert_eq!(gaussian_q(-40.0), 1.0);
        assert_eq!(normal_cdf(0.0), 0.5);
    }
}
