//! Seeded Monte Carlo simulation of the detector.
//!
//! A trial draws `p` signal-bearing snapshots `x_i = a s_i + Sigma^{1/2} g_i`
//! (the `a s_i` term only under H1) and `n` noise-only snapshots
//! `z_l = Sigma^{1/2} h_l`, forms `R_hat = X X^H / p` and
//! `Sigma_hat = Z Z^H / n`, and returns `lambda_hat = lambda_max(Sigma_hat^{-1} R_hat)`
//! through a Cholesky congruence and a Hermitian eigensolver.
//!
//! Each trial owns a ChaCha8 stream keyed by `(seed, hypothesis, trial)`, so
//! results do not depend on the number of worker threads.

use faer::linalg::matmul::matmul;
use faer::linalg::triangular_solve::solve_lower_triangular_in_place;
use faer::{c64, Accum, Mat, Par, Side};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactcdf::{ModelDims, Noncentrality};
use crate::roc::{RocCurve, RocPoint};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Hypothesis {
    H0,
    H1,
}

/// How a trial is generated.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SamplerKind {
    /// Full snapshot matrices through the model's `Sigma`, `a`, `s`.
    #[default]
    Direct,
    /// Bartlett factors of the whitened Wishart matrices. Same law of
    /// `lambda_hat` (it depends on the model only through `omega`) at
    /// `O(m^2)` random draws per trial. Falls back to `Direct` when `p <= m`.
    Bartlett,
}

/// Noise covariance families.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CovarianceSpec {
    #[default]
    Identity,
    /// `Sigma_ij = rho^{|i-j|}`.
    Ar1 { rho: f64 },
    /// `G G^H / dof` for an `m x dof` complex Gaussian `G` drawn from `seed`.
    RandomWishart { dof: usize, seed: u64 },
    /// Real and optional imaginary parts, row-major.
    Explicit {
        re: Vec<Vec<f64>>,
        #[serde(default)]
        im: Option<Vec<Vec<f64>>>,
    },
}

impl CovarianceSpec {
    pub fn build(&self, m: usize) -> Result<Mat<c64>> {
        match self {
            CovarianceSpec::Identity => Ok(Mat::identity(m, m)),
            CovarianceSpec::Ar1 { rho } => {
                if !(rho.abs() < 1.0) {
                    return Err(Error::Config(format!("AR(1) needs |rho| < 1, got {rho}")));
                }
                Ok(Mat::from_fn(m, m, |i, j| {
                    c64::new(rho.powi((i as i32 - j as i32).abs()), 0.0)
                }))
            }
            CovarianceSpec::RandomWishart { dof, seed } => {
                if *dof < m {
                    return Err(Error::Config(format!(
                        "random Wishart covariance needs dof >= m (got dof={dof}, m={m})"
                    )));
                }
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                let g = normal_mat(&mut rng, m, *dof);
                let mut s = Mat::<c64>::zeros(m, m);
                matmul(s.as_mut(), Accum::Replace, g.as_ref(), g.adjoint(), c64::new(1.0 / *dof as f64, 0.0), Par::Seq);
                Ok(s)
            }
            CovarianceSpec::Explicit { re, im } => {
                let ok = |rows: &Vec<Vec<f64>>| rows.len() == m && rows.iter().all(|r| r.len() == m);
                if !ok(re) || im.as_ref().is_some_and(|im| !ok(im)) {
                    return Err(Error::Config(format!("explicit covariance must be {m} x {m}")));
                }
                Ok(Mat::from_fn(m, m, |i, j| {
                    c64::new(re[i][j], im.as_ref().map_or(0.0, |im| im[i][j]))
                }))
            }
        }
    }
}

/// Detection model: dimensions, noise covariance, steering vector, signal.
#[derive(Debug, Clone)]
pub struct SignalModel {
    dims: ModelDims,
    sigma: Mat<c64>,
    chol: Mat<c64>,
    a_vec: Vec<c64>,
    s_vec: Vec<c64>,
    omega: f64,
    white: bool,
}

impl SignalModel {
    /// `omega = ||s||^2 a^H Sigma^{-1} a` is derived. `Sigma` must be
    /// Hermitian positive definite.
    pub fn new(dims: ModelDims, sigma: Mat<c64>, a_vec: Vec<c64>, s_vec: Vec<c64>) -> Result<Self> {
        let m = dims.m();
        if sigma.nrows() != m || sigma.ncols() != m {
            return Err(Error::Config(format!("Sigma must be {m} x {m}")));
        }
        if a_vec.len() != m || s_vec.len() != dims.p() {
            return Err(Error::Config(format!(
                "need a of length m={m} and s of length p={} (got {}, {})",
                dims.p(),
                a_vec.len(),
                s_vec.len()
            )));
        }
        for i in 0..m {
            for j in 0..=i {
                let (u, v) = (sigma[(i, j)], sigma[(j, i)].conj());
                if (u - v).norm() > 1e-10 * (1.0 + u.norm()) {
                    return Err(Error::Config("Sigma is not Hermitian".into()));
                }
            }
        }
        let chol = sigma
            .llt(Side::Lower)
            .map_err(|e| Error::Linalg(format!("Cholesky of Sigma failed: {e:?}")))?
            .L()
            .to_owned();
        let mut w = Mat::from_fn(m, 1, |i, _| a_vec[i]);
        solve_lower_triangular_in_place(chol.as_ref(), w.as_mut(), Par::Seq);
        let quad: f64 = (0..m).map(|i| w[(i, 0)].norm_sqr()).sum();
        let s2: f64 = s_vec.iter().map(|s| s.norm_sqr()).sum();
        let white = (0..m).all(|i| (0..m).all(|j| sigma[(i, j)] == if i == j { c64::new(1.0, 0.0) } else { c64::new(0.0, 0.0) }));
        Ok(Self {
            dims,
            sigma,
            chol,
            a_vec,
            s_vec,
            omega: s2 * quad,
            white,
        })
    }

    /// `Sigma = I`, `a = e_1`, `s` constant with `||s||^2 = omega`.
    pub fn canonical(dims: ModelDims, omega: f64) -> Result<Self> {
        Self::with_covariance(dims, omega, &CovarianceSpec::Identity)
    }

    /// Given covariance, `a = e_1`, and a constant `s` scaled to hit `omega`.
    pub fn with_covariance(dims: ModelDims, omega: f64, cov: &CovarianceSpec) -> Result<Self> {
        let omega = Noncentrality::new(omega)?.value();
        let m = dims.m();
        let mut a = vec![c64::new(0.0, 0.0); m];
        a[0] = c64::new(1.0, 0.0);
        let probe = Self::new(dims, cov.build(m)?, a.clone(), vec![c64::new(1.0, 0.0); dims.p()])?;
        let scale = (omega / probe.omega).sqrt();
        let s = vec![c64::new(scale, 0.0); dims.p()];
        Self::new(dims, probe.sigma, a, s)
    }

    pub fn dims(&self) -> ModelDims {
        self.dims
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn sigma(&self) -> &Mat<c64> {
        &self.sigma
    }

    pub fn a_vec(&self) -> &[c64] {
        &self.a_vec
    }

    pub fn s_vec(&self) -> &[c64] {
        &self.s_vec
    }

    /// Same model with `Sigma` multiplied by `k > 0`.
    pub fn scaled_sigma(&self, k: f64) -> Result<Self> {
        if !(k > 0.0) {
            return Err(Error::Domain(format!("scale must be positive, got {k}")));
        }
        let sigma = Mat::from_fn(self.dims.m(), self.dims.m(), |i, j| self.sigma[(i, j)] * k);
        Self::new(self.dims, sigma, self.a_vec.clone(), self.s_vec.clone())
    }
}

/// The RNG for one trial.
pub fn trial_rng(seed: u64, hypothesis: Hypothesis, trial: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8] = match hypothesis {
        Hypothesis::H0 => 0,
        Hypothesis::H1 => 1,
    };
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(trial);
    rng
}

/// Unit-variance circular complex Gaussian (Box-Muller).
fn complex_normal<R: Rng>(rng: &mut R) -> c64 {
    let u1: f64 = 1.0 - rng.random::<f64>();
    let u2: f64 = rng.random();
    let r = (-u1.ln()).sqrt();
    let (s, c) = (std::f64::consts::TAU * u2).sin_cos();
    c64::new(r * c, r * s)
}

fn normal_mat<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> Mat<c64> {
    Mat::from_fn(rows, cols, |_, _| complex_normal(rng))
}

fn lambda_max(h: &Mat<c64>) -> Result<f64> {
    let ev = h
        .self_adjoint_eigenvalues(Side::Lower)
        .map_err(|e| Error::Linalg(format!("eigensolver failed: {e:?}")))?;
    Ok(*ev.last().expect("non-empty matrix"))
}

/// `lambda_max(S^{-1} R)` with `R = X X^H`, given the lower Cholesky factor
/// of `S`; `x` is overwritten.
fn whitened_top(s_factor: &Mat<c64>, mut x: Mat<c64>) -> Result<f64> {
    solve_lower_triangular_in_place(s_factor.as_ref(), x.as_mut(), Par::Seq);
    let (r, c) = (x.nrows(), x.ncols());
    let k = r.min(c);
    let mut g = Mat::<c64>::zeros(k, k);
    if c >= r {
        matmul(g.as_mut(), Accum::Replace, x.as_ref(), x.adjoint(), c64::new(1.0, 0.0), Par::Seq);
    } else {
        matmul(g.as_mut(), Accum::Replace, x.adjoint(), x.as_ref(), c64::new(1.0, 0.0), Par::Seq);
    }
    lambda_max(&g)
}

fn sample_direct<R: Rng>(model: &SignalModel, hyp: Hypothesis, rng: &mut R) -> Result<f64> {
    let (m, n, p) = (model.dims.m(), model.dims.n(), model.dims.p());
    let colour = |g: Mat<c64>| -> Mat<c64> {
        if model.white {
            return g;
        }
        let mut out = Mat::<c64>::zeros(g.nrows(), g.ncols());
        matmul(out.as_mut(), Accum::Replace, model.chol.as_ref(), g.as_ref(), c64::new(1.0, 0.0), Par::Seq);
        out
    };
    let mut x = colour(normal_mat(rng, m, p));
    if hyp == Hypothesis::H1 {
        for j in 0..p {
            for i in 0..m {
                x[(i, j)] += model.a_vec[i] * model.s_vec[j];
            }
        }
    }
    let z = colour(normal_mat(rng, m, n));
    let mut s = Mat::<c64>::zeros(m, m);
    matmul(s.as_mut(), Accum::Replace, z.as_ref(), z.adjoint(), c64::new(1.0, 0.0), Par::Seq);
    let l = s
        .llt(Side::Lower)
        .map_err(|e| Error::Linalg(format!("Cholesky of the sample covariance failed: {e:?}")))?
        .L()
        .to_owned();
    Ok(whitened_top(&l, x)? * n as f64 / p as f64)
}

/// Lower Bartlett factor of a `CW_m(dof, I)` matrix.
fn bartlett<R: Rng>(rng: &mut R, m: usize, dof: usize) -> Mat<c64> {
    let mut l = Mat::<c64>::zeros(m, m);
    for j in 0..m {
        let g = Gamma::new((dof - j) as f64, 1.0).expect("positive shape");
        l[(j, j)] = c64::new(g.sample(rng).sqrt(), 0.0);
        for i in j + 1..m {
            l[(i, j)] = complex_normal(rng);
        }
    }
    l
}

fn sample_bartlett<R: Rng>(model: &SignalModel, hyp: Hypothesis, rng: &mut R) -> Result<f64> {
    let (m, n, p) = (model.dims.m(), model.dims.n(), model.dims.p());
    let s_factor = bartlett(rng, m, n);
    // R = y y^H + T T^H after rotating the signal onto the first snapshot
    let t = bartlett(rng, m, p - 1);
    let mut x = Mat::<c64>::zeros(m, m + 1);
    for i in 0..m {
        x[(i, 0)] = complex_normal(rng);
        for j in 0..=i {
            x[(i, j + 1)] = t[(i, j)];
        }
    }
    if hyp == Hypothesis::H1 {
        x[(0, 0)] += c64::new(model.omega.sqrt(), 0.0);
    }
    Ok(whitened_top(&s_factor, x)? * n as f64 / p as f64)
}

/// One draw of `lambda_hat` under `hypothesis`.
pub fn sample_lambda_max<R: Rng>(
    model: &SignalModel,
    hypothesis: Hypothesis,
    sampler: SamplerKind,
    rng: &mut R,
) -> Result<f64> {
    match sampler {
        SamplerKind::Bartlett if model.dims.p() > model.dims.m() => sample_bartlett(model, hypothesis, rng),
        _ => sample_direct(model, hypothesis, rng),
    }
}

/// Sorted Monte Carlo sample of `lambda_hat`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalCdf {
    sorted_samples: Vec<f64>,
    seed: u64,
    trials: usize,
}

impl EmpiricalCdf {
    pub fn from_samples(mut samples: Vec<f64>, seed: u64) -> Result<Self> {
        if samples.iter().any(|x| x.is_nan()) {
            return Err(Error::NumericRange("NaN in Monte Carlo sample".into()));
        }
        samples.sort_by(f64::total_cmp);
        Ok(Self {
            trials: samples.len(),
            sorted_samples: samples,
            seed,
        })
    }

    pub fn samples(&self) -> &[f64] {
        &self.sorted_samples
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn trials(&self) -> usize {
        self.trials
    }

    /// Fraction of samples `<= x`.
    pub fn eval(&self, x: f64) -> f64 {
        self.sorted_samples.partition_point(|&s| s <= x) as f64 / self.trials as f64
    }

    /// Fraction of samples `> x`.
    pub fn exceedance(&self, x: f64) -> f64 {
        1.0 - self.eval(x)
    }

    /// Smallest sample with `eval >= q`.
    pub fn quantile(&self, q: f64) -> f64 {
        let k = ((q * self.trials as f64).ceil() as usize).clamp(1, self.trials);
        self.sorted_samples[k - 1]
    }

    /// Kolmogorov distance to a continuous CDF.
    pub fn sup_distance(&self, cdf: impl Fn(f64) -> f64) -> f64 {
        let n = self.trials as f64;
        self.sorted_samples
            .iter()
            .enumerate()
            .map(|(i, &x)| {
                let f = cdf(x);
                (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
            })
            .fold(0.0, f64::max)
    }

    /// `max_k |F_n(x_k) - cdf(x_k)|` over the given points.
    pub fn max_gap_at(&self, points: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
        points.iter().map(|&x| (self.eval(x) - cdf(x)).abs()).fold(0.0, f64::max)
    }

    /// Single-column CSV.
    pub fn to_csv(&self) -> String {
        crate::report::csv_table(&["lambda_hat"], self.sorted_samples.iter().map(|&x| vec![x]))
    }
}

/// Half-width of the two-sided DKW band at confidence `1 - level`.
pub fn dkw_half_width(trials: usize, level: f64) -> f64 {
    ((2.0 / level).ln() / (2.0 * trials as f64)).sqrt()
}

/// Two-sample Kolmogorov-Smirnov statistic.
pub fn ks_two_sample(a: &EmpiricalCdf, b: &EmpiricalCdf) -> f64 {
    let (x, y) = (a.samples(), b.samples());
    let (nx, ny) = (x.len() as f64, y.len() as f64);
    let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
    while i < x.len() && j < y.len() {
        let v = x[i].min(y[j]);
        while i < x.len() && x[i] <= v {
            i += 1;
        }
        while j < y.len() && y[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / nx - j as f64 / ny).abs());
    }
    d
}

/// Asymptotic two-sample KS critical value at significance `level`.
pub fn ks_critical(n1: usize, n2: usize, level: f64) -> f64 {
    let c = (-(level / 2.0).ln() / 2.0).sqrt();
    c * ((n1 + n2) as f64 / (n1 * n2) as f64).sqrt()
}

/// Normal-approximation binomial confidence half-width at 99%.
pub fn binomial_half_width99(p: f64, trials: usize) -> f64 {
    2.5758293035489004 * (p * (1.0 - p) / trials as f64).sqrt()
}

/// Draws `trials` independent samples of `lambda_hat`, in parallel.
pub fn empirical_cdf(
    model: &SignalModel,
    hypothesis: Hypothesis,
    trials: usize,
    seed: u64,
    sampler: SamplerKind,
) -> Result<EmpiricalCdf> {
    if trials < 100 {
        return Err(Error::Config(format!("need at least 100 trials, got {trials}")));
    }
    let samples = (0..trials as u64)
        .into_par_iter()
        .map(|k| sample_lambda_max(model, hypothesis, sampler, &mut trial_rng(seed, hypothesis, k)))
        .collect::<Result<Vec<_>>>()?;
    EmpiricalCdf::from_samples(samples, seed)
}

/// ROC from paired null / alternative samples. Thresholds are empirical
/// null quantiles, so each point's `pf` is the realised null exceedance.
pub fn empirical_roc(
    model: &SignalModel,
    trials: usize,
    pf_grid: &[f64],
    seed: u64,
    sampler: SamplerKind,
) -> Result<RocCurve> {
    if pf_grid.iter().any(|&p| !(p > 0.0 && p < 1.0)) {
        return Err(Error::Domain("pf grid must lie inside (0,1)".into()));
    }
    let h0 = empirical_cdf(model, Hypothesis::H0, trials, seed, sampler)?;
    let h1 = empirical_cdf(model, Hypothesis::H1, trials, seed, sampler)?;
    Ok(roc_from_samples(model.dims, model.omega, &h0, &h1, pf_grid))
}

pub fn roc_from_samples(
    dims: ModelDims,
    omega: f64,
    h0: &EmpiricalCdf,
    h1: &EmpiricalCdf,
    pf_grid: &[f64],
) -> RocCurve {
    let points = pf_grid
        .iter()
        .map(|&pf| {
            let threshold = h0.quantile(1.0 - pf);
            RocPoint {
                pf: h0.exceedance(threshold),
                pd: h1.exceedance(threshold),
                threshold,
            }
        })
        .collect();
    RocCurve { dims, omega, points }
}

fn cplx(v: &[[f64; 2]]) -> Vec<c64> {
    v.iter().map(|&[re, im]| c64::new(re, im)).collect()
}

/// JSON-configurable simulation run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    pub m: usize,
    pub n: usize,
    pub p: usize,
    /// Target `omega`; with no explicit vectors, `a = e_1` and a constant `s`
    /// are scaled to reach it.
    #[serde(default)]
    pub omega: Option<f64>,
    /// Steering vector `a` as `[re, im]` pairs.
    #[serde(default)]
    pub steering: Option<Vec<[f64; 2]>>,
    /// Signal `s` as `[re, im]` pairs.
    #[serde(default)]
    pub signal: Option<Vec<[f64; 2]>>,
    #[serde(default)]
    pub covariance: CovarianceSpec,
    #[serde(default = "default_hypothesis")]
    pub hypothesis: Hypothesis,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub sampler: SamplerKind,
}

fn default_hypothesis() -> Hypothesis {
    Hypothesis::H1
}

fn default_trials() -> usize {
    100_000
}

impl SimConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(format!("bad simulation config: {e}")))
    }

    pub fn dims(&self) -> Result<ModelDims> {
        ModelDims::new(self.m, self.n, self.p)
    }

    pub fn model(&self) -> Result<SignalModel> {
        let dims = self.dims()?;
        match (&self.steering, &self.signal) {
            (Some(a), Some(s)) => {
                let model = SignalModel::new(dims, self.covariance.build(self.m)?, cplx(a), cplx(s))?;
                if let Some(w) = self.omega {
                    if (w - model.omega).abs() > 1e-9 * (1.0 + w) {
                        return Err(Error::Config(format!(
                            "omega = {w} disagrees with the vectors' omega = {}",
                            model.omega
                        )));
                    }
                }
                Ok(model)
            }
            (None, None) => {
                let w = self
                    .omega
                    .ok_or_else(|| Error::Config("give either omega or both steering and signal".into()))?;
                SignalModel::with_covariance(dims, w, &self.covariance)
            }
            _ => Err(Error::Config("steering and signal must be given together".into())),
        }
    }

    pub fn run(&self) -> Result<EmpiricalCdf> {
        empirical_cdf(&self.model()?, self.hypothesis, self.trials, self.seed, self.sampler)
    }
}
