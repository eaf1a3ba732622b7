//! Unitary Tracy-Widom distribution `F2`.
//!
//! Values come from a precomputed table on `s = -10 + 0.02 i`, `i = 0..=800`
//! (`assets/tw2_table.csv`, produced by `tools/gen_tw2_table.py`). Between
//! grid points the table is interpolated by a monotone cubic Hermite spline
//! whose node slopes are fourth-order finite differences, limited with the
//! Fritsch-Carlson conditions.

use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Embedded CSV asset, format version 1 (`s,F2`).
pub const TW2_TABLE_CSV: &str = include_str!("../../assets/tw2_table.csv");

const HEADER: &str = "# tw2 table v1: s in [-10, 6], step 0.02, 801 rows";

#[derive(Debug, Clone)]
pub struct Tw2Table {
    start: f64,
    step: f64,
    cdf: Vec<f64>,
    slopes: Vec<f64>,
}

impl Tw2Table {
    /// Parses the versioned CSV. The grid must be uniform.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        match lines.next() {
            Some(h) if h.trim() == HEADER => {}
            other => {
                return Err(Error::Config(format!("unexpected tw2 table header {other:?}")));
            }
        }
        if lines.next().map(str::trim) != Some("s,F2") {
            return Err(Error::Config("tw2 table: missing `s,F2` column header".into()));
        }
        let mut grid = Vec::new();
        let mut cdf = Vec::new();
        for (row, line) in lines.enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let (s, f) = line
                .split_once(',')
                .ok_or_else(|| Error::Config(format!("tw2 table row {row}: expected two columns")))?;
            let parse = |v: &str| {
                v.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Config(format!("tw2 table row {row}: {e}")))
            };
            grid.push(parse(s)?);
            cdf.push(parse(f)?);
        }
        if grid.len() < 8 {
            return Err(Error::Config("tw2 table too short".into()));
        }
        let start = grid[0];
        let step = (grid[grid.len() - 1] - start) / (grid.len() - 1) as f64;
        for (i, s) in grid.iter().enumerate() {
            if (s - (start + step * i as f64)).abs() > 1e-9 {
                return Err(Error::Config(format!("tw2 table grid is not uniform at row {i}")));
            }
        }
        if cdf.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::Config("tw2 table is not monotone".into()));
        }
        let slopes = monotone_slopes(&cdf, step);
        Ok(Self {
            start,
            step,
            cdf,
            slopes,
        })
    }

    /// Serialises back to the asset format, byte-for-byte.
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(self.cdf.len() * 32);
        out.push_str(HEADER);
        out.push_str("\ns,F2\n");
        for (i, f) in self.cdf.iter().enumerate() {
            let s = self.start + self.step * i as f64;
            out.push_str(&format!("{s:.2},{}\n", sci17(*f)));
        }
        out
    }

    pub fn grid(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.cdf.len()).map(move |i| self.start + self.step * i as f64)
    }

    pub fn values(&self) -> &[f64] {
        &self.cdf
    }

    pub fn start(&self) -> f64 {
        self.start
    }

    pub fn end(&self) -> f64 {
        self.start + self.step * (self.cdf.len() - 1) as f64
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    /// Interpolated `F2(s)`; `0` left of the table and `1` right of it.
    pub fn cdf(&self, s: f64) -> f64 {
        if s.is_nan() {
            return f64::NAN;
        }
        if s <= self.start {
            return if s == self.start { self.cdf[0] } else { 0.0 };
        }
        let last = self.cdf.len() - 1;
        if s >= self.end() {
            return if s == self.end() { self.cdf[last] } else { 1.0 };
        }
        let pos = (s - self.start) / self.step;
        let i = (pos.floor() as usize).min(last - 1);
        self.hermite(i, pos - i as f64)
    }

    fn hermite(&self, i: usize, u: f64) -> f64 {
        let (y0, y1) = (self.cdf[i], self.cdf[i + 1]);
        let (d0, d1) = (self.slopes[i] * self.step, self.slopes[i + 1] * self.step);
        let u2 = u * u;
        let u3 = u2 * u;
        let h00 = 2.0 * u3 - 3.0 * u2 + 1.0;
        let h10 = u3 - 2.0 * u2 + u;
        let h01 = -2.0 * u3 + 3.0 * u2;
        let h11 = u3 - u2;
        (h00 * y0 + h10 * d0 + h01 * y1 + h11 * d1).clamp(y0, y1)
    }

    /// Inverse of [`Tw2Table::cdf`] for `q` inside the tabulated range.
    pub fn quantile(&self, q: f64) -> Result<f64> {
        if !(q > 0.0 && q < 1.0) {
            return Err(Error::Domain(format!("tw2 quantile needs q in (0,1), got {q}")));
        }
        let last = self.cdf.len() - 1;
        if q < self.cdf[0] || q > self.cdf[last] {
            return Err(Error::NumericRange(format!(
                "q = {q} lies outside the tabulated F2 range [{:e}, {}]",
                self.cdf[0], self.cdf[last]
            )));
        }
        // first node with cdf >= q
        let hi = self.cdf.partition_point(|&f| f < q).max(1);
        let i = hi - 1;
        let (mut lo_u, mut hi_u) = (0.0, 1.0);
        for _ in 0..80 {
            let mid = 0.5 * (lo_u + hi_u);
            if self.hermite(i, mid) < q {
                lo_u = mid;
            } else {
                hi_u = mid;
            }
        }
        Ok(self.start + self.step * (i as f64 + 0.5 * (lo_u + hi_u)))
    }
}

// Python's `{:.17e}`: 17 fractional digits, exponent padded to two digits.
fn sci17(x: f64) -> String {
    let s = format!("{x:.17e}");
    let (mant, exp) = s.split_once('e').expect("exponent");
    let (sign, digits) = match exp.strip_prefix('-') {
        Some(d) => ('-', d),
        None => ('+', exp),
    };
    format!("{mant}e{sign}{digits:0>2}")
}

fn monotone_slopes(y: &[f64], h: f64) -> Vec<f64> {
    let n = y.len();
    let mut d = vec![0.0; n];
    for i in 0..n {
        d[i] = if i >= 2 && i + 2 < n {
            (y[i - 2] - 8.0 * y[i - 1] + 8.0 * y[i + 1] - y[i + 2]) / (12.0 * h)
        } else if i + 4 < n {
            (-25.0 * y[i] + 48.0 * y[i + 1] - 36.0 * y[i + 2] + 16.0 * y[i + 3] - 3.0 * y[i + 4])
                / (12.0 * h)
        } else {
            (25.0 * y[i] - 48.0 * y[i - 1] + 36.0 * y[i - 2] - 16.0 * y[i - 3] + 3.0 * y[i - 4])
                / (12.0 * h)
        };
        d[i] = d[i].max(0.0);
    }
    for i in 0..n - 1 {
        let delta = (y[i + 1] - y[i]) / h;
        if delta == 0.0 {
            d[i] = 0.0;
            d[i + 1] = 0.0;
            continue;
        }
        let a = d[i] / delta;
        let b = d[i + 1] / delta;
        let r = a * a + b * b;
        if r > 9.0 {
            let tau = 3.0 / r.sqrt();
            d[i] = tau * a * delta;
            d[i + 1] = tau * b * delta;
        }
    }
    d
}

/// The shared table parsed from the embedded asset.
pub fn tw2_table() -> &'static Tw2Table {
    static TABLE: OnceLock<Tw2Table> = OnceLock::new();
    TABLE.get_or_init(|| Tw2Table::from_csv(TW2_TABLE_CSV).expect("embedded tw2 table is valid"))
}

/// `F2(s)`.
pub fn tw2_cdf(s: f64) -> f64 {
    tw2_table().cdf(s)
}

/// `F2^{-1}(q)` for `q in (0,1)`.
pub fn tw2_quantile(q: f64) -> Result<f64> {
    tw2_table().quantile(q)
}
