//! Monte Carlo check of the exact law, with colored noise.
//!
//! ```bash
//! ROYMAX_THREADS=4 cargo run --release -p roymax --example monte_carlo
//! ```

use roymax::exactcdf::cdf_test_statistic;
use roymax::mcsim::{
    dkw_half_width, empirical_cdf, empirical_roc, CovarianceSpec, Hypothesis, SamplerKind, SignalModel,
};
use roymax::roc::roc_curve;
use roymax::{Error, ModelDims};

fn main() -> Result<(), Error> {
    if let Ok(n) = std::env::var("ROYMAX_THREADS") {
        let n = n.parse().map_err(|_| Error::Config("ROYMAX_THREADS must be an integer".into()))?;
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().expect("fresh pool");
    }
    let dims = ModelDims::new(4, 7, 6)?;
    let trials = 20_000;
    let band = dkw_half_width(trials, 0.01);

    for cov in [CovarianceSpec::Identity, CovarianceSpec::Ar1 { rho: 0.9 }] {
        let model = SignalModel::with_covariance(dims, 3.0, &cov)?;
        for (hyp, w) in [(Hypothesis::H0, 0.0), (Hypothesis::H1, 3.0)] {
            let e = empirical_cdf(&model, hyp, trials, 1, SamplerKind::Direct)?;
            let gap = e.sup_distance(|x| cdf_test_statistic(dims, w, x).unwrap_or(f64::NAN));
            println!("{cov:?} {hyp:?}: sup |F_emp - F| = {gap:.4} (99% band {band:.4})");
        }
    }

    let pfs = [0.01, 0.05, 0.1, 0.3];
    let model = SignalModel::canonical(dims, 3.0)?;
    let emp = empirical_roc(&model, trials, &pfs, 2, SamplerKind::Bartlett)?;
    let exact = roc_curve(dims, 3.0, &pfs)?;
    for (a, b) in emp.points.iter().zip(&exact.points) {
        println!("pf {:<5.2} pd empirical {:.4} exact {:.4}", a.pf, a.pd, b.pd);
    }
    Ok(())
}
