//! The Tracy-Widom (beta = 2) law: CDF, density by differencing, quantiles.
//!
//! ```bash
//! cargo run -p roymax --example tracy_widom
//! ```

use roymax::specfun::{tw2_cdf, tw2_quantile};
use roymax::Error;

fn main() -> Result<(), Error> {
    let h = 1e-3;
    println!("{:>6} {:>12} {:>10}", "s", "F2(s)", "f2(s)");
    for i in 0..=12 {
        let s = -5.0 + 0.75 * i as f64;
        let f = (tw2_cdf(s + h) - tw2_cdf(s - h)) / (2.0 * h);
        println!("{s:>6.2} {:>12.8} {f:>10.6}", tw2_cdf(s));
    }
    for q in [0.01, 0.05, 0.5, 0.95, 0.99] {
        println!("q = {q:<5} s = {:.6}", tw2_quantile(q)?);
    }
    Ok(())
}
