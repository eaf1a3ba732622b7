mod common;

use proptest::prelude::*;
use roymax::asympt::{
    alt_cdf_approx, asympt_power, asympt_threshold, edge_constants, null_cdf_approx, spike_constants, SpectrumParams,
};
use roymax::mcsim::{empirical_cdf, Hypothesis, SamplerKind, SignalModel};
use roymax::ModelDims;

use common::dkw;

fn sp(c1: f64, c2: f64, g: f64) -> SpectrumParams {
    SpectrumParams::new(c1, c2, g).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn spike_separates_above_transition(c1 in 0.02f64..0.98, c2 in 0.02f64..0.9, lift in 1e-3f64..20.0) {
        let gp = edge_constants(sp(c1, c2, 1.0)).gamma_p;
        let s = spike_constants(sp(c1, c2, gp + lift)).unwrap();
        let e = edge_constants(sp(c1, c2, gp + lift));
        prop_assert!(s.xi > e.mu);
        prop_assert!(s.sigma1 > 0.0);
        prop_assert!(e.sigma0 > 0.0 && e.r > 0.0 && e.r < 1.0);
    }

    #[test]
    fn power_is_monotone(c1 in 0.05f64..0.9, c2 in 0.05f64..0.8, lift in 0.05f64..10.0, m in 5usize..400, pf in 0.005f64..0.9) {
        let gp = edge_constants(sp(c1, c2, 1.0)).gamma_p;
        let g = gp + lift;
        let base = asympt_power(sp(c1, c2, g), m, pf).unwrap();
        // just above gamma_p, sigma1 -> 0 sends the Gaussian formula to
        // power 1 whenever the TW threshold is negative; the approximation
        // only describes a spike that clears the edge by several TW widths
        let e = edge_constants(sp(c1, c2, g));
        let xi = spike_constants(sp(c1, c2, g)).unwrap().xi;
        prop_assume!((m as f64).powf(2.0 / 3.0) * (xi - e.mu) / e.sigma0 > 5.0);
        prop_assert!(asympt_power(sp(c1, c2, g * 1.1), m, pf).unwrap() >= base - 1e-12);
        prop_assert!(asympt_power(sp(c1, c2, g), m + 10, pf).unwrap() >= base - 1e-12);
        prop_assert!(asympt_power(sp(c1, c2, g), m, (pf * 1.05).min(0.99)).unwrap() >= base - 1e-12);
    }

    #[test]
    fn subcritical_roc_is_diagonal(c1 in 0.05f64..0.9, c2 in 0.05f64..0.8, frac in 0.0f64..0.999, m in 1usize..500, pf in 0.001f64..0.999) {
        let gp = edge_constants(sp(c1, c2, 1.0)).gamma_p;
        prop_assert_eq!(asympt_power(sp(c1, c2, frac * gp), m, pf).unwrap(), pf);
    }
}

#[test]
fn spike_meets_edge_at_transition() {
    for (c1, c2) in [(0.25, 0.5), (0.1, 0.2), (0.6, 0.3), (0.9, 0.7)] {
        let e = edge_constants(sp(c1, c2, 1.0));
        let near = sp(c1, c2, e.gamma_p * (1.0 + 1e-4));
        let s = spike_constants(near).unwrap();
        assert!((s.xi - e.mu).abs() < 1e-2 * e.mu);
        let far = spike_constants(sp(c1, c2, e.gamma_p * 2.0)).unwrap();
        assert!(s.sigma1 < 0.1 * far.sigma1);
        assert!(spike_constants(sp(c1, c2, e.gamma_p)).is_err());
    }
}

#[test]
fn alternative_law_is_gaussian_above_and_null_below() {
    let m = 100;
    let above = sp(0.25, 0.5, 5.0);
    let s = spike_constants(above).unwrap();
    assert!((alt_cdf_approx(above, m, s.xi).unwrap() - 0.5).abs() < 1e-15);
    let below = sp(0.25, 0.5, 1.0);
    for x in [12.0, 12.8, 13.5] {
        assert_eq!(alt_cdf_approx(below, m, x).unwrap(), null_cdf_approx(below, m, x).unwrap());
    }
}

/// c1 = 0.25, c2 = 0.5: the edge approximation error shrinks at the
/// `m^{-2/3}` rate and is under 0.1 by m = 100.
#[test]
fn edge_law_converges_to_monte_carlo_null() {
    let trials = 3000;
    let mut gaps = Vec::new();
    for m in [25, 50, 100] {
        let (n, p) = (2 * m, 4 * m);
        let params = SpectrumParams::from_dims(m, n, p, 0.0).unwrap();
        let d = ModelDims::new(m, n, p).unwrap();
        let e = empirical_cdf(&SignalModel::canonical(d, 0.0).unwrap(), Hypothesis::H0, trials, 12, SamplerKind::Bartlett)
            .unwrap();
        gaps.push(e.sup_distance(|x| null_cdf_approx(params, m, x).unwrap()));
        if m == 100 {
            let th = asympt_threshold(params, m, 0.05).unwrap();
            assert!(e.exceedance(th) < 0.05 + dkw(trials, 0.01));
        }
    }
    assert!(gaps.windows(2).all(|w| w[1] < w[0]), "{gaps:?}");
    assert!(gaps[2] < 0.1 + dkw(trials, 0.01), "{gaps:?}");
}
