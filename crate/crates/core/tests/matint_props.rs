use proptest::prelude::*;
use roymax::exactcdf::cdf_lambda_max;
use roymax::matint::{matrix_integral, series_cdf, series_consistency_residual, MatIntParams};
use roymax::ModelDims;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn series_agrees_with_determinant_form(m in 1usize..=4, alpha in 0usize..=3, beta in 0usize..=4, omega in 0.0f64..5.0, z in 0.05f64..0.7) {
        let d = ModelDims::new(m, m + alpha, m + beta).unwrap();
        prop_assert!(series_consistency_residual(d, omega, z, 60).unwrap() < 1e-8);
        let (value, terms) = series_cdf(d, omega, z, 200).unwrap();
        prop_assert!(terms < 200);
        prop_assert!((value - cdf_lambda_max(d, omega, z / (1.0 - z)).unwrap()).abs() < 1e-10);
    }

    #[test]
    fn integral_positive_and_decreasing_in_z(alpha in 0usize..=4, beta in 0usize..=4, nu in 0usize..=6, m in 1usize..=4, a in 0.1f64..3.0, z in 0.05f64..0.85, dz in 0.01f64..0.1) {
        let lo = matrix_integral(MatIntParams::new(alpha, beta, nu, m, a, z).unwrap()).unwrap();
        let hi = matrix_integral(MatIntParams::new(alpha, beta, nu, m, a, (z + dz).min(0.99)).unwrap()).unwrap();
        prop_assert!(lo > 0.0);
        prop_assert!(hi <= lo * (1.0 + 1e-10), "{lo} -> {hi}");
    }
}

#[test]
fn truncation_error_shrinks_with_terms() {
    let d = ModelDims::new(3, 5, 6).unwrap();
    let r: Vec<f64> = [2, 5, 10, 20, 40]
        .iter()
        .map(|&k| series_consistency_residual(d, 4.0, 0.6, k).unwrap())
        .collect();
    assert!(r.windows(2).all(|w| w[1] < w[0] || w[1] < 1e-14), "{r:?}");
    assert!(r[4] < 1e-12);
}
