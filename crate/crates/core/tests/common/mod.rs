//! Oracles shared by the integration tests. None of these call into the
//! library code they check.
#![allow(dead_code)]

/// `F2(s)` by RK4 on the Painleve II system `q'' = 2q^3 + xq`, `u'' = q^2`,
/// started at `x = 10` from Airy data, `F2 = exp(-u)`. Points must be `<= 10`.
pub fn tw2_ode(points: &[f64]) -> Vec<f64> {
    let init = [
        1.104_753_255_289_868_6e-10,
        -3.520_633_676_738_923_6e-10,
        2.938_427_133_604_718e-22,
        -1.900_639_350_526_161_6e-21,
    ];
    let f = |x: f64, y: [f64; 4]| [y[1], 2.0 * y[0] * y[0] * y[0] + x * y[0], y[3], y[0] * y[0]];
    let mut idx: Vec<usize> = (0..points.len()).collect();
    idx.sort_by(|&a, &b| points[b].partial_cmp(&points[a]).unwrap());
    let mut out = vec![0.0; points.len()];
    let (mut x, mut y) = (10.0f64, init);
    for i in idx {
        let n = ((x - points[i]) / 2.5e-4).ceil().max(0.0) as usize;
        if n > 0 {
            let h = (points[i] - x) / n as f64;
            for _ in 0..n {
                let k1 = f(x, y);
                let y2: [f64; 4] = std::array::from_fn(|j| y[j] + 0.5 * h * k1[j]);
                let k2 = f(x + 0.5 * h, y2);
                let y3: [f64; 4] = std::array::from_fn(|j| y[j] + 0.5 * h * k2[j]);
                let k3 = f(x + 0.5 * h, y3);
                let y4: [f64; 4] = std::array::from_fn(|j| y[j] + h * k3[j]);
                let k4 = f(x + h, y4);
                y = std::array::from_fn(|j| y[j] + h * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]) / 6.0);
                x += h;
            }
            x = points[i];
        }
        out[i] = (-y[2]).exp();
    }
    out
}

fn ln_choose(n: u64, k: u64) -> f64 {
    libm::lgamma((n + 1) as f64) - libm::lgamma((k + 1) as f64) - libm::lgamma((n - k + 1) as f64)
}

/// Regularized incomplete beta `I_x(a, b)` for positive integers through
/// the binomial tail.
pub fn inc_beta_int(x: f64, a: u64, b: u64) -> f64 {
    let n = a + b - 1;
    (a..=n)
        .map(|k| (ln_choose(n, k) + k as f64 * x.ln() + (n - k) as f64 * (-x).ln_1p()).exp())
        .sum::<f64>()
        .min(1.0)
}

/// CDF of `|sqrt(omega) + g_1|^2 + ... + |g_p|^2` over an independent
/// `Gamma(n)`: the `m = 1` F law, as a Poisson mixture of beta laws.
pub fn scalar_noncentral_f_cdf(n: u64, p: u64, omega: f64, t: f64) -> f64 {
    let x = t / (1.0 + t);
    let mut total = 0.0;
    let mut j = 0u64;
    loop {
        let w = (-omega + j as f64 * omega.ln() - libm::lgamma((j + 1) as f64)).exp();
        let w = if omega == 0.0 { if j == 0 { 1.0 } else { 0.0 } } else { w };
        total += w * inc_beta_int(x, p + j, n);
        if (j as f64) > omega && w < 1e-18 || j > 2000 {
            break;
        }
        j += 1;
    }
    total
}

/// `sqrt(ln(2/level) / (2 trials))`.
pub fn dkw(trials: usize, level: f64) -> f64 {
    ((2.0 / level).ln() / (2.0 * trials as f64)).sqrt()
}

pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

pub fn logspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    linspace(a.ln(), b.ln(), n).into_iter().map(f64::exp).collect()
}
