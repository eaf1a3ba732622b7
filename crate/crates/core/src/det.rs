//! Determinants of matrices whose entries span hundreds of orders of
//! magnitude.
//!
//! Entries arrive in signed log form. Each row is stored divided by its
//! largest magnitude, with the log scale kept alongside, and the matrix goes
//! through LU with partial pivoting on the unscaled magnitudes.

use faer::linalg::solvers::DenseSolveCore;
use faer::Mat;

use crate::specfun::LogSigned;

/// Determinant of a square matrix given row by row.
pub fn log_det(rows: &[Vec<LogSigned>]) -> LogSigned {
    let n = rows.len();
    if n == 0 {
        return LogSigned::ONE;
    }
    // row r of the true matrix is exp(scale[r]) * a[r]
    let mut scale = vec![0.0f64; n];
    let mut a = vec![0.0f64; n * n];
    for (i, row) in rows.iter().enumerate() {
        assert_eq!(row.len(), n, "determinant needs a square matrix");
        let row_max = row
            .iter()
            .filter(|e| !e.is_zero())
            .map(|e| e.ln_abs)
            .max_by(|x, y| x.total_cmp(y));
        let Some(row_max) = row_max else {
            return LogSigned::ZERO;
        };
        scale[i] = row_max;
        for (j, e) in row.iter().enumerate() {
            a[i * n + j] = if e.is_zero() {
                0.0
            } else {
                f64::from(e.sign) * (e.ln_abs - row_max).exp()
            };
        }
    }
    let mut sign = 1i8;
    let mut ln_acc = 0.0;
    for k in 0..n {
        // pivot on the true magnitude; the scaled entries alone tie whenever
        // several rows peak in the same column
        let mut piv = None;
        let mut best = f64::NEG_INFINITY;
        for r in k..n {
            let v = a[r * n + k];
            if v != 0.0 {
                let mag = v.abs().ln() + scale[r];
                if mag > best {
                    best = mag;
                    piv = Some(r);
                }
            }
        }
        let Some(piv) = piv else {
            return LogSigned::ZERO;
        };
        if piv != k {
            for c in 0..n {
                a.swap(k * n + c, piv * n + c);
            }
            scale.swap(k, piv);
            sign = -sign;
        }
        let p = a[k * n + k];
        if p < 0.0 {
            sign = -sign;
        }
        ln_acc += p.abs().ln() + scale[k];
        for r in k + 1..n {
            // the elimination step is the same in scaled and true units
            let f = a[r * n + k] / p;
            if f == 0.0 {
                continue;
            }
            let mut row_max = 0.0f64;
            for c in k + 1..n {
                a[r * n + c] -= f * a[k * n + c];
                row_max = row_max.max(a[r * n + c].abs());
            }
            if row_max > 0.0 && row_max.is_finite() {
                let inv = row_max.recip();
                for c in k + 1..n {
                    a[r * n + c] *= inv;
                }
                scale[r] += row_max.ln();
            }
        }
    }
    LogSigned::new(sign, ln_acc)
}

/// Determinant together with its componentwise condition number
/// `sum_ij |a_ij (A^{-1})_ji|`, which bounds the relative change in the
/// determinant per unit relative perturbation of the entries. The number is
/// invariant under row and column scaling, so it is computed on an
/// equilibrated copy.
pub fn log_det_with_condition(rows: &[Vec<LogSigned>]) -> (LogSigned, f64) {
    let det = log_det(rows);
    let n = rows.len();
    if det.is_zero() {
        return (det, f64::INFINITY);
    }
    if n <= 1 {
        return (det, n as f64);
    }
    let mut ln = vec![f64::NEG_INFINITY; n * n];
    for (i, row) in rows.iter().enumerate() {
        for (j, e) in row.iter().enumerate() {
            if !e.is_zero() {
                ln[i * n + j] = e.ln_abs;
            }
        }
    }
    for _ in 0..4 {
        for i in 0..n {
            let mx = (0..n).map(|j| ln[i * n + j]).fold(f64::NEG_INFINITY, f64::max);
            (0..n).for_each(|j| ln[i * n + j] -= mx);
        }
        for j in 0..n {
            let mx = (0..n).map(|i| ln[i * n + j]).fold(f64::NEG_INFINITY, f64::max);
            if mx.is_finite() {
                (0..n).for_each(|i| ln[i * n + j] -= mx);
            }
        }
    }
    let b = Mat::from_fn(n, n, |i, j| {
        let e = rows[i][j];
        if e.is_zero() {
            0.0
        } else {
            f64::from(e.sign) * ln[i * n + j].exp()
        }
    });
    let inv = b.partial_piv_lu().inverse();
    let mut cond = 0.0;
    for i in 0..n {
        for j in 0..n {
            cond += (b[(i, j)] * inv[(j, i)]).abs();
        }
    }
    (det, if cond.is_finite() { cond } else { f64::INFINITY })
}
