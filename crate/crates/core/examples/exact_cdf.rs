//! Exact CDF of the largest generalized eigenvalue, and its quantiles.
//!
//! ```bash
//! cargo run -p roymax --example exact_cdf
//! ```

use roymax::exactcdf::{cdf_lambda_max_eval, cdf_test_statistic, quantile};
use roymax::{Error, ModelDims};

fn main() -> Result<(), Error> {
    // 4 antennas, 8 noise-only snapshots, 6 signal snapshots
    let dims = ModelDims::new(4, 8, 6)?;

    println!("{:>8} {:>12} {:>12} {:>10}", "t", "F(t; 0)", "F(t; 5)", "condition");
    for t in [0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0] {
        let null = cdf_lambda_max_eval(dims, 0.0, t)?;
        let alt = cdf_lambda_max_eval(dims, 5.0, t)?;
        println!("{t:>8.2} {:>12.6} {:>12.6} {:>10.1e}", null.value, alt.value, alt.condition);
    }

    // thresholds on the test-statistic scale lambda_hat = (n/p) lambda
    for pf in [0.1, 0.01, 0.001] {
        let th = quantile(dims, 0.0, 1.0 - pf, true)?;
        let pd = 1.0 - cdf_test_statistic(dims, 5.0, th)?;
        println!("pf = {pf:<6} threshold = {th:9.4}  pd(omega=5) = {pd:.4}");
    }

    // past the f64 limit the library refuses rather than guess
    let wide = ModelDims::new(1, 20, 30)?;
    match cdf_lambda_max_eval(wide, 40.0, 10.0) {
        Ok(e) => println!("F = {}", e.value),
        Err(e) => println!("refused: {e}"),
    }
    Ok(())
}
