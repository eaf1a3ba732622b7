//! Exact ROC curves for a few SNRs, and the large-p limit.
//!
//! ```bash
//! cargo run -p roymax --example roc_curves
//! ```

use roymax::roc::{limiting_roc_fixed_m, logit_grid, roc_curve, ScalingLaw};
use roymax::{Error, ModelDims};

fn main() -> Result<(), Error> {
    let dims = ModelDims::new(3, 10, 8)?;
    let pfs = logit_grid(1e-3, 0.5, 6)?;

    print!("{:>8}", "pf");
    let omegas = [1.0, 4.0, 10.0];
    for w in omegas {
        print!("  {:>14}", format!("pd(omega={w})"));
    }
    println!();
    let curves: Vec<_> = omegas.iter().map(|&w| roc_curve(dims, w, &pfs)).collect::<Result<_, _>>()?;
    for (i, pf) in pfs.iter().enumerate() {
        print!("{pf:>8.4}");
        for c in &curves {
            print!("  {:>14.4}", c.points[i].pd);
        }
        println!();
    }

    // ||s||^2 = k p^eps; eps = 1 is the critical growth rate
    let law = ScalingLaw::new(0.5, 1.0)?;
    println!("\nfixed m = 3, p -> inf, k = 0.5, a^H Sigma^-1 a = 2:");
    for pf in [0.01, 0.05, 0.1] {
        println!("  pf {pf:<5} pd {:.4}", limiting_roc_fixed_m(3, law, 2.0, pf)?);
    }
    Ok(())
}
