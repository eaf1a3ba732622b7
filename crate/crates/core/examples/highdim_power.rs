//! High-dimensional approximations: phase transition, Tracy-Widom null,
//! Gaussian spike, and the resulting power.
//!
//! ```bash
//! cargo run -p roymax --example highdim_power
//! ```

use roymax::asympt::{asympt_power, edge_constants, spike_constants, SpectrumParams};
use roymax::Error;

fn main() -> Result<(), Error> {
    let (c1, c2) = (0.25, 0.5);
    let edge = edge_constants(SpectrumParams::new(c1, c2, 0.0)?);
    println!("c1 = {c1}, c2 = {c2}: bulk edge mu = {:.4}, gamma_p = {:.4}", edge.mu, edge.gamma_p);

    println!("{:>6} {:>10} {:>10} {:>10}", "gamma", "xi", "pd m=50", "pd m=200");
    for gamma in [1.0, 2.0, 3.0, 5.0, 8.0] {
        let sp = SpectrumParams::new(c1, c2, gamma)?;
        let xi = spike_constants(sp).map(|s| format!("{:.4}", s.xi)).unwrap_or_else(|_| "-".into());
        let pd50 = asympt_power(sp, 50, 0.05)?;
        let pd200 = asympt_power(sp, 200, 0.05)?;
        println!("{gamma:>6} {xi:>10} {pd50:>10.4} {pd200:>10.4}");
    }
    Ok(())
}
