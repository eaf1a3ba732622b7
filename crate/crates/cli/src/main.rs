//! `roymax`: command-line front end. Emits CSV or JSON tables; with `--out`
//! a `<out>.manifest.json` records everything needed to reproduce the file.
//! `ROYMAX_THREADS` caps the worker pool.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use roymax::asympt::{
    alt_cdf_approx, asympt_power, asympt_threshold, edge_constants, null_cdf_approx, spike_constants,
    SpectrumParams,
};
use roymax::exactcdf::{cdf_grid, limiting_scaled_cdf, quantile, LimitRegime};
use roymax::mcsim::{empirical_cdf, empirical_roc, CovarianceSpec, Hypothesis, SignalModel, SimConfig};
use roymax::report::{csv_table, fmt_f64};
use roymax::roc::{default_pf_grid, limiting_roc_fixed_m, limiting_roc_highdim, logit_grid, roc_curve, ScalingLaw};
use roymax::validate::{self, Suite};
use roymax::{Error, ModelDims};

const THREADS_VAR: &str = "ROYMAX_THREADS";

#[derive(Parser, Serialize)]
#[command(name = "roymax", version, about = "Largest-eigenvalue detection: exact and asymptotic laws, ROC, Monte Carlo")]
struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Csv, global = true)]
    format: Format,
    /// Write here instead of stdout; also writes <out>.manifest.json.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 42, global = true)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum, Serialize, PartialEq)]
#[serde(rename_all = "lowercase")]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand, Serialize)]
#[serde(rename_all = "lowercase")]
enum Command {
    /// CDF of the largest eigenvalue over a grid.
    Cdf(CdfArgs),
    /// Inverse CDF.
    Quantile(QuantileArgs),
    /// Exact or limiting ROC curve.
    Roc(RocArgs),
    /// High-dimensional constants, approximate CDFs and power.
    Asympt(AsymptArgs),
    /// Monte Carlo samples, empirical CDF or empirical ROC.
    Simulate(SimArgs),
    /// Run the self-check suites; exits nonzero on any failure.
    Validate(ValidateArgs),
}

#[derive(Args, Serialize, Clone)]
struct DimArgs {
    #[arg(long)]
    m: usize,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    p: usize,
    #[arg(long, default_value_t = 0.0)]
    omega: f64,
}

impl DimArgs {
    fn dims(&self) -> Result<ModelDims, Error> {
        ModelDims::new(self.m, self.n, self.p)
    }
}

#[derive(Clone, Copy, ValueEnum, Serialize, PartialEq)]
#[serde(rename_all = "lowercase")]
enum Regime {
    /// Finite-dimensional exact law.
    Exact,
    /// Tracy-Widom / Gaussian approximation (needs --gamma).
    Highdim,
    /// m = n scaled limit of lambda_max / m^2 (needs --tau or --phi).
    Limit,
}

#[derive(Args, Serialize)]
struct CdfArgs {
    #[command(flatten)]
    dims: DimArgs,
    /// start:stop:count, inclusive and linear.
    #[arg(long)]
    t_grid: String,
    #[arg(long, value_enum, default_value_t = Regime::Exact)]
    regime: Regime,
    /// Use the test-statistic scale lambda_hat = (n/p) lambda.
    #[arg(long)]
    scaled: bool,
    /// SNR for --regime highdim; 0 gives the null law.
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long, conflicts_with = "phi")]
    tau: Option<f64>,
    #[arg(long)]
    phi: Option<f64>,
}

#[derive(Args, Serialize)]
struct QuantileArgs {
    #[command(flatten)]
    dims: DimArgs,
    #[arg(long)]
    q: f64,
    #[arg(long)]
    scaled: bool,
}

#[derive(Clone, Copy, ValueEnum, Serialize, PartialEq)]
#[serde(rename_all = "kebab-case")]
enum Limit {
    FixedM,
    Highdim,
}

#[derive(Args, Serialize)]
struct RocArgs {
    #[command(flatten)]
    dims: DimArgs,
    /// start:stop:count of false-alarm rates; default 199 logit-spaced points.
    #[arg(long)]
    pf_grid: Option<String>,
    /// Space the pf grid evenly in logit(pf).
    #[arg(long)]
    logit: bool,
    /// Print a limiting ROC instead of the exact one.
    #[arg(long, value_enum)]
    limit: Option<Limit>,
    #[arg(long, default_value_t = 1.0)]
    k: f64,
    #[arg(long)]
    epsilon: Option<f64>,
    /// k a^H Sigma^{-1} a.
    #[arg(long)]
    gamma_quad: Option<f64>,
    #[arg(long)]
    c1: Option<f64>,
}

#[derive(Args, Serialize)]
struct AsymptArgs {
    #[arg(long)]
    c1: f64,
    #[arg(long)]
    c2: f64,
    #[arg(long, default_value_t = 0.0)]
    gamma: f64,
    #[arg(long)]
    m: Option<usize>,
    /// Print edge and spike constants only.
    #[arg(long)]
    constants: bool,
    /// Power curve over these false-alarm rates.
    #[arg(long)]
    pf_grid: Option<String>,
    #[arg(long)]
    logit: bool,
    /// Null and alternative CDF approximations over this grid.
    #[arg(long)]
    x_grid: Option<String>,
}

#[derive(Clone, Copy, ValueEnum, Serialize, PartialEq)]
#[serde(rename_all = "lowercase")]
enum SimWhat {
    Samples,
    Cdf,
    Roc,
}

#[derive(Args, Serialize)]
struct SimArgs {
    #[arg(value_enum)]
    what: SimWhat,
    /// JSON simulation config; overrides the dimension flags.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    p: Option<usize>,
    #[arg(long)]
    omega: Option<f64>,
    #[arg(long, default_value = "h1")]
    hypothesis: String,
    #[arg(long)]
    trials: Option<usize>,
    /// identity | ar1:<rho> | wishart:<dof>
    #[arg(long, default_value = "identity")]
    covariance: String,
    #[arg(long, default_value = "direct")]
    sampler: String,
    /// Grid for `simulate cdf`; also prints the exact CDF alongside.
    #[arg(long)]
    t_grid: Option<String>,
    #[arg(long)]
    pf_grid: Option<String>,
    #[arg(long)]
    logit: bool,
}

#[derive(Args, Serialize)]
struct ValidateArgs {
    #[arg(long, default_value = "all")]
    suite: String,
    #[arg(long, default_value_t = 20_000)]
    trials: usize,
}

/// `start:stop:count`, inclusive, linear or logit-spaced.
fn parse_grid(spec: &str, logit: bool) -> Result<Vec<f64>, Error> {
    let bad = || Error::Config(format!("grid '{spec}' is not start:stop:count"));
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return Err(bad());
    }
    let a: f64 = parts[0].trim().parse().map_err(|_| bad())?;
    let b: f64 = parts[1].trim().parse().map_err(|_| bad())?;
    let count: usize = parts[2].trim().parse().map_err(|_| bad())?;
    if logit {
        return logit_grid(a, b, count);
    }
    if count == 0 || !(a <= b) || (count == 1 && a != b) {
        return Err(bad());
    }
    if count == 1 {
        return Ok(vec![a]);
    }
    Ok((0..count).map(|i| a + (b - a) * i as f64 / (count - 1) as f64).collect())
}

fn pf_grid(spec: &Option<String>, logit: bool) -> Result<Vec<f64>, Error> {
    spec.as_deref().map_or_else(|| Ok(default_pf_grid()), |s| parse_grid(s, logit))
}

/// A rectangular result, or a single JSON document.
enum Output {
    Table { header: Vec<&'static str>, rows: Vec<Vec<f64>> },
    Doc(Value),
    Text(String),
}

impl Output {
    fn render(&self, format: Format) -> String {
        match (self, format) {
            (Output::Table { header, rows }, Format::Csv) => csv_table(header, rows.iter().cloned()),
            (Output::Table { header, rows }, Format::Json) => {
                let recs: Vec<Value> = rows
                    .iter()
                    .map(|r| Value::Object(header.iter().map(|h| h.to_string()).zip(r.iter().map(|&v| json!(v))).collect()))
                    .collect();
                serde_json::to_string_pretty(&recs).expect("serializable") + "\n"
            }
            (Output::Doc(v), Format::Json) => serde_json::to_string_pretty(v).expect("serializable") + "\n",
            (Output::Doc(Value::Object(map)), Format::Csv) => {
                let mut out = String::from("key,value\n");
                for (k, v) in map {
                    let cell = match v {
                        Value::Number(x) => x.as_f64().map_or_else(|| x.to_string(), fmt_f64),
                        other => other.to_string(),
                    };
                    out.push_str(&format!("{k},{cell}\n"));
                }
                out
            }
            (Output::Doc(v), Format::Csv) => format!("{v}\n"),
            (Output::Text(t), Format::Csv) => t.clone(),
            (Output::Text(t), Format::Json) => serde_json::to_string_pretty(&json!({ "report": t })).expect("serializable") + "\n",
        }
    }
}

fn table(header: &[&'static str], rows: Vec<Vec<f64>>) -> Output {
    Output::Table {
        header: header.to_vec(),
        rows,
    }
}

fn cmd_cdf(a: &CdfArgs) -> Result<Output, Error> {
    let grid = parse_grid(&a.t_grid, false)?;
    let values: Vec<f64> = match a.regime {
        Regime::Exact => {
            let dims = a.dims.dims()?;
            cdf_grid(dims, a.dims.omega, &grid, a.scaled)?
        }
        Regime::Highdim => {
            let gamma = a.gamma.ok_or_else(|| Error::Config("--regime highdim needs --gamma".into()))?;
            let sp = SpectrumParams::from_dims(a.dims.m, a.dims.n, a.dims.p, gamma)?;
            grid.iter()
                .map(|&x| if gamma == 0.0 { null_cdf_approx(sp, a.dims.m, x) } else { alt_cdf_approx(sp, a.dims.m, x) })
                .collect::<Result<_, _>>()?
        }
        Regime::Limit => {
            let regime = match (a.tau, a.phi) {
                (Some(t), None) => LimitRegime::Tau(t),
                (None, Some(p)) => LimitRegime::Phi(p),
                _ => return Err(Error::Config("--regime limit needs exactly one of --tau, --phi".into())),
            };
            let c1 = a.dims.m as f64 / a.dims.p as f64;
            grid.iter().map(|&x| limiting_scaled_cdf(c1, x, regime)).collect::<Result<_, _>>()?
        }
    };
    let rows = grid.iter().zip(values).map(|(&t, v)| vec![t, v]).collect();
    Ok(table(&["t", "cdf"], rows))
}

fn cmd_quantile(a: &QuantileArgs) -> Result<Output, Error> {
    let v = quantile(a.dims.dims()?, a.dims.omega, a.q, a.scaled)?;
    Ok(table(&["q", "quantile"], vec![vec![a.q, v]]))
}

fn cmd_roc(a: &RocArgs) -> Result<Output, Error> {
    let grid = pf_grid(&a.pf_grid, a.logit || a.pf_grid.is_none())?;
    if let Some(limit) = a.limit {
        let eps = a.epsilon.ok_or_else(|| Error::Config("--limit needs --epsilon".into()))?;
        let gq = a.gamma_quad.ok_or_else(|| Error::Config("--limit needs --gamma-quad".into()))?;
        let law = ScalingLaw::new(a.k, eps)?;
        let rows = grid
            .iter()
            .map(|&pf| {
                let pd = match limit {
                    Limit::FixedM => limiting_roc_fixed_m(a.dims.m, law, gq, pf)?,
                    Limit::Highdim => {
                        let c1 = a.c1.unwrap_or(a.dims.m as f64 / a.dims.p as f64);
                        limiting_roc_highdim(c1, law, gq, pf)?
                    }
                };
                Ok(vec![pf, pd])
            })
            .collect::<Result<_, Error>>()?;
        return Ok(table(&["pf", "pd"], rows));
    }
    let curve = roc_curve(a.dims.dims()?, a.dims.omega, &grid)?;
    let rows = curve.points.iter().map(|p| vec![p.pf, p.pd, p.threshold]).collect();
    Ok(table(&["pf", "pd", "threshold"], rows))
}

fn cmd_asympt(a: &AsymptArgs) -> Result<Output, Error> {
    let sp = SpectrumParams::new(a.c1, a.c2, a.gamma)?;
    let need_m = || a.m.ok_or_else(|| Error::Config("this output needs --m".into()));
    if let Some(g) = &a.x_grid {
        let m = need_m()?;
        let rows = parse_grid(g, false)?
            .into_iter()
            .map(|x| Ok(vec![x, null_cdf_approx(sp, m, x)?, alt_cdf_approx(sp, m, x)?]))
            .collect::<Result<_, Error>>()?;
        return Ok(table(&["x", "null_cdf", "alt_cdf"], rows));
    }
    if a.pf_grid.is_some() && !a.constants {
        let m = need_m()?;
        let rows = pf_grid(&a.pf_grid, a.logit)?
            .into_iter()
            .map(|pf| Ok(vec![pf, asympt_power(sp, m, pf)?, asympt_threshold(sp, m, pf)?]))
            .collect::<Result<_, Error>>()?;
        return Ok(table(&["pf", "pd", "threshold"], rows));
    }
    let e = edge_constants(sp);
    let mut doc = json!({ "r": e.r, "mu": e.mu, "sigma0": e.sigma0, "gamma_p": e.gamma_p });
    if let Ok(s) = spike_constants(sp) {
        doc["xi"] = json!(s.xi);
        doc["sigma1"] = json!(s.sigma1);
        doc["tsq"] = json!(s.tsq);
    }
    if let (Some(m), false) = (a.m, a.constants) {
        doc["power_at_pf_0.05"] = json!(asympt_power(sp, m, 0.05)?);
    }
    Ok(Output::Doc(doc))
}

fn parse_covariance(s: &str, seed: u64) -> Result<CovarianceSpec, Error> {
    let (kind, arg) = s.split_once(':').unwrap_or((s, ""));
    let num = |what: &str| arg.parse::<f64>().map_err(|_| Error::Config(format!("--covariance {kind} needs :{what}")));
    match kind {
        "identity" => Ok(CovarianceSpec::Identity),
        "ar1" => Ok(CovarianceSpec::Ar1 { rho: num("rho")? }),
        "wishart" => Ok(CovarianceSpec::RandomWishart { dof: num("dof")? as usize, seed }),
        _ => Err(Error::Config(format!("unknown covariance '{s}' (identity, ar1:<rho>, wishart:<dof>)"))),
    }
}

fn sim_config(a: &SimArgs, seed: u64) -> Result<SimConfig, Error> {
    if let Some(path) = &a.config {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        return SimConfig::from_json(&text);
    }
    let need = |v: Option<usize>, f: &str| v.ok_or_else(|| Error::Config(format!("simulate needs --{f} or --config")));
    let quoted = |s: &str| Value::String(s.to_string());
    Ok(SimConfig {
        m: need(a.m, "m")?,
        n: need(a.n, "n")?,
        p: need(a.p, "p")?,
        omega: Some(a.omega.unwrap_or(0.0)),
        steering: None,
        signal: None,
        covariance: parse_covariance(&a.covariance, seed)?,
        hypothesis: serde_json::from_value(quoted(&a.hypothesis))
            .map_err(|_| Error::Config(format!("--hypothesis must be h0 or h1, got {}", a.hypothesis)))?,
        trials: a.trials.unwrap_or(100_000),
        seed,
        sampler: serde_json::from_value(quoted(&a.sampler))
            .map_err(|_| Error::Config(format!("--sampler must be direct or bartlett, got {}", a.sampler)))?,
    })
}

fn cmd_simulate(a: &SimArgs, seed: u64) -> Result<(Output, Value), Error> {
    let cfg = sim_config(a, seed)?;
    let model: SignalModel = cfg.model()?;
    let cfg_json = serde_json::to_value(&cfg).expect("serializable");
    let out = match a.what {
        SimWhat::Samples => {
            let e = cfg.run()?;
            table(&["lambda_hat"], e.samples().iter().map(|&x| vec![x]).collect())
        }
        SimWhat::Cdf => {
            let e = empirical_cdf(&model, cfg.hypothesis, cfg.trials, cfg.seed, cfg.sampler)?;
            let grid = match &a.t_grid {
                Some(g) => parse_grid(g, false)?,
                None => (1..=99).map(|k| e.quantile(k as f64 / 100.0)).collect(),
            };
            let omega = if cfg.hypothesis == Hypothesis::H1 { model.omega() } else { 0.0 };
            let exact = cdf_grid(model.dims(), omega, &grid, true)?;
            let rows = grid.iter().zip(exact).map(|(&x, f)| vec![x, e.eval(x), f]).collect();
            table(&["x", "empirical_cdf", "exact_cdf"], rows)
        }
        SimWhat::Roc => {
            let grid = pf_grid(&a.pf_grid, a.logit || a.pf_grid.is_none())?;
            let c = empirical_roc(&model, cfg.trials, &grid, cfg.seed, cfg.sampler)?;
            table(&["pf", "pd", "threshold"], c.points.iter().map(|p| vec![p.pf, p.pd, p.threshold]).collect())
        }
    };
    Ok((out, cfg_json))
}

fn write_manifest(cli: &Cli, out: &PathBuf, extra: Option<Value>) -> Result<(), Error> {
    let timestamp = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    let manifest = json!({
        "command": std::env::args().collect::<Vec<_>>(),
        "parameters": cli,
        "resolved_config": extra,
        "seed": cli.seed,
        "version": env!("CARGO_PKG_VERSION"),
        "timestamp_unix": timestamp,
        "outputs": [out],
    });
    let mut path = out.clone().into_os_string();
    path.push(".manifest.json");
    std::fs::write(&path, serde_json::to_string_pretty(&manifest).expect("serializable") + "\n")
        .map_err(|e| Error::Config(format!("cannot write manifest: {e}")))
}

fn init_threads() -> Result<(), Error> {
    if let Ok(v) = std::env::var(THREADS_VAR) {
        let n: usize = v
            .parse()
            .map_err(|_| Error::Config(format!("{THREADS_VAR} must be a positive integer, got '{v}'")))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<bool, Error> {
    init_threads()?;
    let mut extra = None;
    let mut ok = true;
    let output = match &cli.command {
        Command::Cdf(a) => cmd_cdf(a)?,
        Command::Quantile(a) => cmd_quantile(a)?,
        Command::Roc(a) => cmd_roc(a)?,
        Command::Asympt(a) => cmd_asympt(a)?,
        Command::Simulate(a) => {
            let (o, cfg) = cmd_simulate(a, cli.seed)?;
            extra = Some(cfg);
            o
        }
        Command::Validate(a) => {
            let suite: Suite = a.suite.parse()?;
            let report = validate::run(suite, validate::Options { seed: cli.seed, trials: a.trials })?;
            ok = report.passed();
            match cli.format {
                Format::Csv => Output::Text(report.to_text()),
                Format::Json => Output::Doc(serde_json::to_value(&report).expect("serializable")),
            }
        }
    };
    let text = output.render(cli.format);
    match &cli.out {
        Some(path) => {
            std::fs::write(path, text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
            write_manifest(cli, path, extra)?;
        }
        None => print!("{text}"),
    }
    Ok(ok)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("validation failed");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
