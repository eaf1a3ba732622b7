//! Scalar special functions: signed log-domain factorial arithmetic, Jacobi
//! polynomials, the Gaussian tail function and the unitary Tracy-Widom law.

mod jacobi;
mod normal;
mod pochhammer;
mod tw2;

pub use jacobi::{jacobi_derivative, jacobi_eval, jacobi_eval_scaled, JacobiParams};
pub use normal::{gaussian_q, normal_cdf};
pub use pochhammer::{ln_factorial, log_pochhammer, LogSigned};
pub use tw2::{tw2_cdf, tw2_quantile, tw2_table, Tw2Table, TW2_TABLE_CSV};
