//! The matrix-integral power series against the determinant formula.
//!
//! ```bash
//! cargo run -p roymax --example series_identity
//! ```

use roymax::exactcdf::cdf_lambda_max;
use roymax::matint::{matrix_integral, series_cdf, series_consistency_residual, MatIntParams};
use roymax::{Error, ModelDims};

fn main() -> Result<(), Error> {
    let dims = ModelDims::new(3, 5, 4)?;
    let omega = 3.0;
    for z in [0.2, 0.5, 0.8] {
        let (s, terms) = series_cdf(dims, omega, z, 400)?;
        let exact = cdf_lambda_max(dims, omega, z / (1.0 - z))?;
        println!("z = {z}: series {s:.12} ({terms} terms)  determinant {exact:.12}");
    }

    println!("\ntruncation error at z = 0.5:");
    for k in [1, 2, 4, 8, 16, 32] {
        println!("  {k:>3} terms  {:.3e}", series_consistency_residual(dims, omega, 0.5, k)?);
    }

    let j = matrix_integral(MatIntParams::new(1, 1, 2, 3, 1.5, 0.5)?)?;
    println!("\nJ(alpha=1, beta=1, nu=2, m=3, a=1.5, z=0.5) = {j:.6e}");
    Ok(())
}
