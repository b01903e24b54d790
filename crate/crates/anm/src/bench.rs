//! Benchmark harness: simulates datasets, runs each structure learner on
//! the same data, and aggregates recovery metrics into per-replicate rows
//! plus a mean/sd summary table.

use std::fmt::Write as _;
use std::path::PathBuf;

use rand::Rng;
use rayon::prelude::*;

use crate::discovery::{brute_force_capped, gds, resit};
use crate::error::{Error, Result};
use crate::graph::{cpdag, Dag, Pdag};
use crate::metrics::{shd, sid};
use crate::regression::RegressionMethod;
use crate::rng::{derive_rng, derive_seed};
use crate::score::LAMBDA_DEFAULT;
use crate::sim::{random_dag_with_prob, simulate, Regime, SimConfig};

/// Structure learners the harness can run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Resit,
    Gds,
    BruteForce,
    /// Draws a DAG with edge probability itself uniform on (0, 1); the
    /// data-independent reference row of the result tables.
    RandomBaseline,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Resit => "resit",
            Method::Gds => "gds",
            Method::BruteForce => "brute_force",
            Method::RandomBaseline => "random_baseline",
        }
    }

    pub fn parse(s: &str) -> Result<Method> {
        match s {
            "resit" => Ok(Method::Resit),
            "gds" => Ok(Method::Gds),
            "brute_force" => Ok(Method::BruteForce),
            "random_baseline" => Ok(Method::RandomBaseline),
            other => Err(Error::BenchConfig(format!(
                "unknown method {other:?}; expected resit, gds, brute_force or random_baseline"
            ))),
        }
    }
}

/// Full benchmark request. `from_key_values` parses the flat config format;
/// fields can also be filled directly.
#[derive(Clone, Debug)]
pub struct BenchConfig {
    pub regimes: Vec<Regime>,
    pub p_list: Vec<usize>,
    pub n_list: Vec<usize>,
    pub replicates: usize,
    pub methods: Vec<Method>,
    pub lambda: f64,
    pub alpha: f64,
    pub seed: u64,
    pub out_dir: Option<PathBuf>,
    /// Lifts the brute-force cap from p <= 4 to p <= 5.
    pub brute_force_p5: bool,
}

impl Default for BenchConfig {
    fn default() -> BenchConfig {
        BenchConfig {
            regimes: vec![Regime::LinearNongauss, Regime::NonlinearGauss],
            p_list: vec![4],
            n_list: vec![100],
            replicates: 100,
            methods: vec![Method::Resit, Method::Gds, Method::BruteForce, Method::RandomBaseline],
            lambda: LAMBDA_DEFAULT,
            alpha: 0.05,
            seed: 0,
            out_dir: None,
            brute_force_p5: false,
        }
    }
}

impl BenchConfig {
    /// Parses `key=value` lines ('#' comments and blank lines ignored).
    /// Keys: regimes, p, n, replicates, methods, lambda, alpha, seed,
    /// out_dir, brute_force_p5. List values are comma-separated. Unknown or
    /// repeated keys abort.
    pub fn from_key_values(text: &str) -> Result<BenchConfig> {
        let mut cfg = BenchConfig::default();
        let mut seen = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::BenchConfig(format!("line {}: expected key=value, got {line:?}", idx + 1))
            })?;
            let (key, value) = (key.trim(), value.trim());
            if seen.contains(&key.to_string()) {
                return Err(Error::BenchConfig(format!("line {}: repeated key {key:?}", idx + 1)));
            }
            seen.push(key.to_string());
            let bad = |what: &str| Error::BenchConfig(format!("line {}: bad {what} {value:?}", idx + 1));
            match key {
                "regimes" => {
                    cfg.regimes = value
                        .split(',')
                        .map(|s| Regime::parse(s.trim()))
                        .collect::<Result<Vec<_>>>()
                        .map_err(|e| Error::BenchConfig(format!("line {}: {e}", idx + 1)))?;
                }
                "p" => {
                    cfg.p_list = value
                        .split(',')
                        .map(|s| s.trim().parse::<usize>().map_err(|_| bad("p")))
                        .collect::<Result<Vec<_>>>()?;
                }
                "n" => {
                    cfg.n_list = value
                        .split(',')
                        .map(|s| s.trim().parse::<usize>().map_err(|_| bad("n")))
                        .collect::<Result<Vec<_>>>()?;
                }
                "replicates" => cfg.replicates = value.parse().map_err(|_| bad("replicates"))?,
                "methods" => {
                    cfg.methods = value
                        .split(',')
                        .map(|s| Method::parse(s.trim()))
                        .collect::<Result<Vec<_>>>()?;
                }
                "lambda" => cfg.lambda = value.parse().map_err(|_| bad("lambda"))?,
                "alpha" => cfg.alpha = value.parse().map_err(|_| bad("alpha"))?,
                "seed" => cfg.seed = value.parse().map_err(|_| bad("seed"))?,
                "out_dir" => cfg.out_dir = Some(PathBuf::from(value)),
                "brute_force_p5" => {
                    cfg.brute_force_p5 = match value {
                        "true" => true,
                        "false" => false,
                        _ => return Err(bad("brute_force_p5")),
                    }
                }
                other => {
                    return Err(Error::BenchConfig(format!("line {}: unknown key {other:?}", idx + 1)))
                }
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let err = |msg: String| Err(Error::BenchConfig(msg));
        if self.regimes.is_empty() || self.p_list.is_empty() || self.n_list.is_empty() {
            return err("regimes, p and n must be non-empty".into());
        }
        if self.methods.is_empty() {
            return err("methods must be non-empty".into());
        }
        if self.replicates == 0 {
            return err("replicates must be >= 1".into());
        }
        if let Some(&p) = self.p_list.iter().find(|&&p| p < 2) {
            return err(format!("p must be >= 2, got {p}"));
        }
        if let Some(&n) = self.n_list.iter().find(|&&n| n < 2) {
            return err(format!("n must be >= 2, got {n}"));
        }
        if !(self.lambda.is_finite() && self.lambda >= 0.0) {
            return err(format!("lambda must be finite and >= 0, got {}", self.lambda));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return err(format!("alpha must be in (0, 1), got {}", self.alpha));
        }
        if self.methods.contains(&Method::BruteForce) {
            let cap = if self.brute_force_p5 { 5 } else { 4 };
            if let Some(&p) = self.p_list.iter().find(|&&p| p > cap) {
                return err(format!("brute_force is capped at p <= {cap}, got p = {p}"));
            }
        }
        Ok(())
    }

    fn brute_force_cap(&self) -> usize {
        if self.brute_force_p5 {
            5
        } else {
            4
        }
    }
}

/// One (regime, p, n, method, replicate) outcome. The three metrics are
/// either all present or all absent with `error` explaining the failure.
#[derive(Clone, Debug)]
pub struct ReplicateRow {
    pub regime: Regime,
    pub p: usize,
    pub n: usize,
    pub method: Method,
    pub replicate: usize,
    pub shd_dag: Option<usize>,
    pub shd_cpdag: Option<usize>,
    pub sid: Option<usize>,
    pub error: Option<String>,
}

/// Aggregated cell: mean and sample sd of one metric over the successful
/// replicates of one (regime, p, n, method).
#[derive(Clone, Debug)]
pub struct SummaryRow {
    pub regime: Regime,
    pub p: usize,
    pub n: usize,
    pub method: Method,
    pub metric: &'static str,
    pub mean: f64,
    pub sd: f64,
    pub replicates: usize,
}

#[derive(Clone, Debug)]
pub struct BenchReport {
    pub rows: Vec<ReplicateRow>,
    pub summary: Vec<SummaryRow>,
}

impl BenchReport {
    pub fn failure_fraction(&self) -> f64 {
        if self.rows.is_empty() {
            return 0.0;
        }
        let failed = self.rows.iter().filter(|r| r.error.is_some()).count();
        failed as f64 / self.rows.len() as f64
    }

    /// Per-replicate CSV: regime,p,n,method,replicate,shd_dag,shd_cpdag,sid,error.
    pub fn replicates_csv(&self) -> String {
        let mut out = String::from("regime,p,n,method,replicate,shd_dag,shd_cpdag,sid,error\n");
        let opt = |v: Option<usize>| v.map(|x| x.to_string()).unwrap_or_default();
        for r in &self.rows {
            let err = match &r.error {
                Some(e) => format!("\"{}\"", e.replace('"', "\"\"")),
                None => String::new(),
            };
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                r.regime.name(),
                r.p,
                r.n,
                r.method.name(),
                r.replicate,
                opt(r.shd_dag),
                opt(r.shd_cpdag),
                opt(r.sid),
                err
            );
        }
        out
    }

    /// Summary CSV: regime,p,n,method,metric,mean,sd,replicates.
    pub fn summary_csv(&self) -> String {
        let mut out = String::from("regime,p,n,method,metric,mean,sd,replicates\n");
        for s in &self.summary {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                s.regime.name(),
                s.p,
                s.n,
                s.method.name(),
                s.metric,
                s.mean,
                s.sd,
                s.replicates
            );
        }
        out
    }
}

fn regime_tag(r: Regime) -> u64 {
    match r {
        Regime::LinearNongauss => 0,
        Regime::NonlinearGauss => 1,
    }
}

/// Regression backend matched to what the regime's mechanisms need.
pub fn regression_for(regime: Regime) -> RegressionMethod {
    match regime {
        Regime::LinearNongauss => RegressionMethod::Linear,
        Regime::NonlinearGauss => RegressionMethod::Kernel,
    }
}

fn measure(truth: &Dag, est: &Dag) -> Result<(usize, usize, usize)> {
    let d = shd(&Pdag::from(truth), &Pdag::from(est))?;
    let c = shd(&cpdag(truth), &cpdag(est))?;
    let s = sid(truth, est)?.bad_pairs;
    Ok((d, c, s))
}

/// Runs every replicate. Each (regime, p, n, replicate) simulates one
/// dataset shared by all methods; seeds derive from the config seed and the
/// cell coordinates only, so adding or removing methods never changes the
/// data. Failures become rows with an error string; the run continues.
pub fn run_benchmark(cfg: &BenchConfig) -> Result<BenchReport> {
    cfg.validate()?;
    let mut tasks = Vec::new();
    for &regime in &cfg.regimes {
        for &p in &cfg.p_list {
            for &n in &cfg.n_list {
                for rep in 0..cfg.replicates {
                    tasks.push((regime, p, n, rep));
                }
            }
        }
    }
    let rows: Vec<ReplicateRow> = tasks
        .par_iter()
        .map(|&(regime, p, n, rep)| run_task(cfg, regime, p, n, rep))
        .collect::<Vec<Vec<ReplicateRow>>>()
        .into_iter()
        .flatten()
        .collect();
    let summary = summarize(&rows);
    Ok(BenchReport { rows, summary })
}

fn run_task(cfg: &BenchConfig, regime: Regime, p: usize, n: usize, rep: usize) -> Vec<ReplicateRow> {
    let tags = [regime_tag(regime), p as u64, n as u64, rep as u64];
    let tagged = |salt: u64| {
        let mut t = vec![salt];
        t.extend_from_slice(&tags);
        t
    };
    let rm = regression_for(regime);
    let blank = |method: Method| ReplicateRow {
        regime,
        p,
        n,
        method,
        replicate: rep,
        shd_dag: None,
        shd_cpdag: None,
        sid: None,
        error: None,
    };

    let sim = SimConfig {
        p,
        n,
        regime,
        seed: derive_seed(cfg.seed, &tagged(10)),
        edge_prob: None,
    };
    let (truth, data) = match simulate(&sim) {
        Ok((g, d, _)) => (g, d),
        Err(e) => {
            // Without data every method row fails identically.
            return cfg
                .methods
                .iter()
                .map(|&m| {
                    let mut row = blank(m);
                    row.error = Some(format!("simulate: {e}"));
                    row
                })
                .collect();
        }
    };

    cfg.methods
        .iter()
        .map(|&method| {
            let mut row = blank(method);
            let est: Result<Dag> = match method {
                Method::Resit => resit(&data, rm, cfg.alpha).map(|r| r.graph),
                Method::Gds => {
                    gds(&data, rm, cfg.lambda, derive_seed(cfg.seed, &tagged(11))).map(|r| r.graph)
                }
                Method::BruteForce => {
                    brute_force_capped(&data, rm, cfg.lambda, cfg.brute_force_cap()).map(|r| r.graph)
                }
                Method::RandomBaseline => {
                    let mut rng = derive_rng(cfg.seed, &tagged(12));
                    let q: f64 = rng.gen();
                    random_dag_with_prob(p, q, derive_seed(cfg.seed, &tagged(13)))
                }
            };
            match est.and_then(|g| measure(&truth, &g)) {
                Ok((d, c, s)) => {
                    row.shd_dag = Some(d);
                    row.shd_cpdag = Some(c);
                    row.sid = Some(s);
                }
                Err(e) => row.error = Some(e.to_string()),
            }
            row
        })
        .collect()
}

fn mean_sd(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Aggregates rows into per-cell metric summaries, cells in first-appearance
/// order. The replicates column counts successful rows only.
pub fn summarize(rows: &[ReplicateRow]) -> Vec<SummaryRow> {
    let mut cells: Vec<(Regime, usize, usize, Method)> = Vec::new();
    for r in rows {
        let key = (r.regime, r.p, r.n, r.method);
        if !cells.contains(&key) {
            cells.push(key);
        }
    }
    let mut out = Vec::new();
    for (regime, p, n, method) in cells {
        let ok: Vec<&ReplicateRow> = rows
            .iter()
            .filter(|r| {
                (r.regime, r.p, r.n, r.method) == (regime, p, n, method) && r.error.is_none()
            })
            .collect();
        let metrics: [(&'static str, fn(&ReplicateRow) -> usize); 3] = [
            ("shd_dag", |r| r.shd_dag.unwrap()),
            ("shd_cpdag", |r| r.shd_cpdag.unwrap()),
            ("sid", |r| r.sid.unwrap()),
        ];
        for (name, get) in metrics {
            let values: Vec<f64> = ok.iter().map(|r| get(r) as f64).collect();
            let (mean, sd) = mean_sd(&values);
            out.push(SummaryRow {
                regime,
                p,
                n,
                method,
                metric: name,
                mean,
                sd,
                replicates: ok.len(),
            });
        }
    }
    out
}
