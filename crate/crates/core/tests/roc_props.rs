mod common;

use faer::{c64, Mat};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use roymax::exactcdf::quantile;
use roymax::mcsim::{binomial_half_width99, empirical_cdf, empirical_roc, CovarianceSpec, Hypothesis, SamplerKind, SignalModel};
use roymax::roc::{
    limiting_roc_fixed_m, pf_pd_at_threshold, roc_alpha0_closed, roc_curve, roc_power_bounds, ScalingLaw,
};
use roymax::ModelDims;

use common::linspace;

fn dims(m: usize, n: usize, p: usize) -> ModelDims {
    ModelDims::new(m, n, p).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn exact_curve_beats_chance(m in 1usize..=4, alpha in 0usize..=3, beta in 0usize..=4, omega in 0.05f64..15.0) {
        let curve = roc_curve(dims(m, m + alpha, m + beta), omega, &linspace(0.02, 0.98, 25)).unwrap();
        for w in curve.points.windows(2) {
            prop_assert!(w[1].pf > w[0].pf);
            prop_assert!(w[1].threshold < w[0].threshold);
        }
        for pt in &curve.points {
            prop_assert!((0.0..=1.0).contains(&pt.pd));
            prop_assert!(pt.pd >= pt.pf - 1e-12, "{pt:?}");
        }
    }
}

#[test]
fn power_grows_with_p_when_signal_energy_keeps_up() {
    let pfs = [0.01, 0.1, 0.3, 0.6];
    for epsilon in [1.0, 1.5] {
        let law = ScalingLaw::new(1.0, epsilon).unwrap();
        for m in [1, 3] {
            let mut prev = vec![0.0; pfs.len()];
            for p in [m, m + 1, m + 3, 10, 20, 50, 120] {
                let omega = law.omega(p, 1.0);
                for (k, &pf) in pfs.iter().enumerate() {
                    let pd = roc_alpha0_closed(m, p - m, omega, pf).unwrap();
                    assert!(pd >= prev[k] - 1e-12, "m={m} p={p} eps={epsilon} pf={pf}");
                    prev[k] = pd;
                }
            }
        }
    }
}

#[test]
fn critical_growth_converges_to_limit() {
    let law = ScalingLaw::new(1.0, 1.0).unwrap();
    let grid = linspace(0.01, 0.99, 50);
    for m in [2, 4] {
        let mut gaps = Vec::new();
        for p in [10, 100, 1000, 10_000] {
            let curve = roc_curve(dims(m, m, p), law.omega(p, 1.0), &grid).unwrap();
            let gap = curve
                .points
                .iter()
                .map(|pt| (pt.pd - limiting_roc_fixed_m(m, law, 1.0, pt.pf).unwrap()).abs())
                .fold(0.0, f64::max);
            gaps.push(gap);
        }
        assert!(gaps.windows(2).all(|w| w[1] < w[0]), "m={m}: {gaps:?}");
    }
}

fn random_pd(rng: &mut ChaCha8Rng, m: usize) -> Mat<c64> {
    let g = Mat::from_fn(m, m + 2, |_, _| c64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
    let mut s = &g * g.adjoint();
    for i in 0..m {
        s[(i, i)] += c64::new(0.1, 0.0);
    }
    s
}

#[test]
fn loewner_order_orders_power() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let d = dims(4, 6, 7);
    let grid = [0.05, 0.2, 0.5];
    for _ in 0..20 {
        let small = random_pd(&mut rng, 4);
        let bump = Mat::from_fn(4, 1, |_, _| c64::new(rng.random::<f64>(), rng.random::<f64>()));
        let large = &small + &bump * bump.adjoint();
        let a: Vec<c64> = (0..4).map(|_| c64::new(rng.random::<f64>(), rng.random::<f64>())).collect();
        let s = vec![c64::new(0.3, 0.1); 7];
        let w_small = SignalModel::new(d, small, a.clone(), s.clone()).unwrap().omega();
        let w_large = SignalModel::new(d, large, a, s).unwrap().omega();
        assert!(w_large <= w_small * (1.0 + 1e-12));
        let pd_small = roc_curve(d, w_small, &grid).unwrap();
        let pd_large = roc_curve(d, w_large, &grid).unwrap();
        for (x, y) in pd_small.points.iter().zip(&pd_large.points) {
            assert!(x.pd >= y.pd - 1e-12);
        }
    }
}

#[test]
fn limiting_power_sits_inside_norm_bounds() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let m = 3;
    for _ in 0..20 {
        let sigma = random_pd(&mut rng, m);
        let ev = sigma.self_adjoint_eigenvalues(faer::Side::Lower).unwrap();
        let (lo, hi) = (ev[0], ev[m - 1]);
        let a: Vec<c64> = (0..m).map(|_| c64::new(rng.random::<f64>(), rng.random::<f64>())).collect();
        let norm2: f64 = a.iter().map(|x| x.norm_sqr()).sum();
        let a: Vec<c64> = a.iter().map(|x| x / norm2.sqrt()).collect();
        let mut unit = vec![c64::new(0.0, 0.0); m];
        unit[0] = c64::new(1.0, 0.0);
        let quad = SignalModel::new(dims(m, m, m), sigma, a, unit).unwrap().omega();
        let k = 2.0;
        let law = ScalingLaw::new(k, 1.0).unwrap();
        for pf in [0.01, 0.2, 0.7] {
            let limit = limiting_roc_fixed_m(m, law, k * quad, pf).unwrap();
            let (lower, upper) = roc_power_bounds(pf, k, m as f64, hi, 1.0 / lo).unwrap();
            assert!(lower <= limit + 1e-12 && limit <= upper + 1e-12, "{lower} {limit} {upper}");
        }
    }
}

#[test]
fn false_alarm_rate_does_not_depend_on_noise_covariance() {
    let d = dims(4, 8, 10);
    let th = quantile(d, 0.0, 0.95, true).unwrap();
    let trials = 100_000;
    let pf = |cov: CovarianceSpec, seed| {
        let model = SignalModel::with_covariance(d, 1.0, &cov).unwrap();
        empirical_cdf(&model, Hypothesis::H0, trials, seed, SamplerKind::Direct).unwrap().exceedance(th)
    };
    let white = pf(CovarianceSpec::Identity, 1);
    let coloured = pf(CovarianceSpec::RandomWishart { dof: 5, seed: 4 }, 2);
    let band = 2.0f64.sqrt() * binomial_half_width99(0.05, trials);
    assert!((white - coloured).abs() < band, "{white} vs {coloured}");
    let (exact_pf, _) = pf_pd_at_threshold(d, 1.0, th).unwrap();
    assert!((exact_pf - 0.05).abs() < 1e-9);
}

#[test]
fn monte_carlo_roc_tracks_exact_curve() {
    let d = dims(4, 8, 10);
    let grid = [0.02, 0.1, 0.3, 0.6];
    let model = SignalModel::with_covariance(d, 2.0, &CovarianceSpec::Ar1 { rho: 0.6 }).unwrap();
    let trials = 20_000;
    let emp = empirical_roc(&model, trials, &grid, 77, SamplerKind::Direct).unwrap();
    for pt in emp.points {
        let (pf, pd) = pf_pd_at_threshold(d, 2.0, pt.threshold).unwrap();
        // threshold is itself estimated, so allow both bands
        let band = binomial_half_width99(pd, trials) + binomial_half_width99(pf, trials);
        assert!((pt.pd - pd).abs() < band, "{pt:?} vs exact {pd}");
    }
}
