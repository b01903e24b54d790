//! Batch front-end for the anm library. Subcommands cover dataset
//! simulation, structure discovery, graph scoring against a ground truth,
//! the reversibility residual diagnostic, the cause-effect-pairs benchmark
//! and the table-reproduction harness. All outputs are CSV or the graph
//! text format; exit code 2 flags usage errors, 1 runtime failures.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use anm::bench::{run_benchmark, BenchConfig};
use anm::data::Dataset;
use anm::discovery::{brute_force_capped, gds, resit, DiscoveryResult};
use anm::graph::{cpdag, parse_dag, parse_pdag, serialize_dag, Dag, Pdag};
use anm::identifiability::{central_grid, ode_residual, AnmTriple, Family};
use anm::metrics::{shd, sid, sid_bounds};
use anm::pairs::{load_pairs, rank_and_curve};
use anm::regression::RegressionMethod;
use anm::rng::derive_seed;
use anm::score::LAMBDA_DEFAULT;
use anm::sim::{simulate, Mechanism, NoiseLaw, Regime, SemSpec, SimConfig};

#[derive(Parser)]
#[command(name = "anm", version, about = "Causal structure discovery for additive noise models")]
struct Cli {
    /// Seed for every stochastic step.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Sample datasets from random additive noise models.
    Simulate {
        #[arg(long)]
        p: usize,
        #[arg(long)]
        n: usize,
        /// linear_nongauss or nonlinear_gauss.
        #[arg(long, value_parser = parse_regime)]
        regime: Regime,
        /// Edge inclusion probability; defaults to the regime's standard draw.
        #[arg(long)]
        edge_prob: Option<f64>,
        #[arg(long, default_value_t = 1)]
        replicates: usize,
        /// Receives rep<k>.data.csv, rep<k>.graph.txt and rep<k>.sem.txt.
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Learn a DAG from a dataset CSV and write it in graph text format.
    Discover {
        #[arg(long)]
        data: PathBuf,
        #[arg(long, value_parser = ["resit", "gds", "brute_force"])]
        method: String,
        #[arg(long, value_parser = parse_regression, default_value = "kernel")]
        regression: RegressionMethod,
        /// Independence level for the pruning phase (resit).
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
        /// Edge penalty for the score methods (gds, brute_force).
        #[arg(long, default_value_t = LAMBDA_DEFAULT)]
        lambda: f64,
        /// Lifts the brute-force cap from p <= 4 to p <= 5.
        #[arg(long)]
        brute_force_p5: bool,
        #[arg(long)]
        out: PathBuf,
        /// Optional key=value side-file with method diagnostics.
        #[arg(long)]
        diagnostics: Option<PathBuf>,
    },
    /// Compare an estimated graph against the true DAG; prints one CSV row.
    Evaluate {
        /// True graph file; must be a DAG.
        #[arg(long = "true")]
        truth: PathBuf,
        /// Estimated graph file; a DAG or a partially directed graph.
        #[arg(long)]
        est: PathBuf,
        /// Comma list from shd, shd_cpdag, sid.
        #[arg(long, default_value = "shd,shd_cpdag,sid")]
        metrics: String,
        /// Destination CSV; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate the reversibility residual of a cause-effect model on a grid.
    Identifiability {
        /// Triple file: keys f (polynomial coefficients, ascending), xi and
        /// nu (family specs like "gaussian: 0, 1" or
        /// "log-mix-lin-exp: -1, 1, 2, 0"), optional grid_steps.
        #[arg(long)]
        triple: PathBuf,
        /// Per-point residual CSV: x,y,residual (blank when inadmissible).
        #[arg(long)]
        out: PathBuf,
    },
    /// Rank cause-effect pairs and write the decision-rate/accuracy curve.
    Pairs {
        /// Directory with pairmeta.txt and per-pair sample files.
        #[arg(long)]
        dir: PathBuf,
        #[arg(long, value_parser = parse_regression, default_value = "kernel")]
        regression: RegressionMethod,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the simulation benchmark described by a key=value config file.
    Bench {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the config's out_dir; files replicates.csv, summary.csv.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
}

fn parse_regime(s: &str) -> std::result::Result<Regime, String> {
    Regime::parse(s).map_err(|e| e.to_string())
}

fn parse_regression(s: &str) -> std::result::Result<RegressionMethod, String> {
    RegressionMethod::parse(s).map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Cmd::Simulate { p, n, regime, edge_prob, replicates, out_dir } => {
            cmd_simulate(cli.seed, p, n, regime, edge_prob, replicates, &out_dir)
        }
        Cmd::Discover { data, method, regression, alpha, lambda, brute_force_p5, out, diagnostics } => {
            cmd_discover(cli.seed, &data, &method, regression, alpha, lambda, brute_force_p5, &out, diagnostics.as_deref())
        }
        Cmd::Evaluate { truth, est, metrics, out } => cmd_evaluate(&truth, &est, &metrics, out.as_deref()),
        Cmd::Identifiability { triple, out } => cmd_identifiability(&triple, &out),
        Cmd::Pairs { dir, regression, out } => cmd_pairs(&dir, regression, &out),
        Cmd::Bench { config, out_dir } => cmd_bench(cli.seed, &config, out_dir),
    }
}

fn cmd_simulate(
    seed: u64,
    p: usize,
    n: usize,
    regime: Regime,
    edge_prob: Option<f64>,
    replicates: usize,
    out_dir: &std::path::Path,
) -> Result<()> {
    if replicates == 0 {
        bail!("replicates must be >= 1");
    }
    fs::create_dir_all(out_dir)
        .with_context(|| format!("creating {}", out_dir.display()))?;
    for rep in 0..replicates {
        let cfg = SimConfig { p, n, regime, seed: derive_seed(seed, &[rep as u64]), edge_prob };
        let (graph, data, spec) = simulate(&cfg)?;
        data.write_csv(&out_dir.join(format!("rep{rep}.data.csv")))?;
        fs::write(out_dir.join(format!("rep{rep}.graph.txt")), serialize_dag(&graph))?;
        fs::write(out_dir.join(format!("rep{rep}.sem.txt")), sem_text(&spec, regime))?;
    }
    Ok(())
}

/// Key=value sidecar describing a realized SEM: per node its parents,
/// mechanism parameters or tables, noise law and the drawn noise column.
fn sem_text(spec: &SemSpec, regime: Regime) -> String {
    let mut out = String::new();
    let join = |v: &[f64]| v.iter().map(f64::to_string).collect::<Vec<_>>().join(",");
    out.push_str(&format!("p={}\n", spec.graph.p()));
    out.push_str(&format!("regime={}\n", regime.name()));
    for j in 0..spec.graph.p() {
        let parents = spec
            .graph
            .parents_of(j)
            .iter()
            .map(|i| i.to_string())
            .collect::<Vec<_>>()
            .join(",");
        out.push_str(&format!("node.{j}.parents={parents}\n"));
        match &spec.mechanisms[j] {
            Mechanism::Linear(coeffs) => {
                out.push_str(&format!("node.{j}.mechanism=linear\n"));
                out.push_str(&format!("node.{j}.coeffs={}\n", join(coeffs)));
            }
            Mechanism::SamplePath(tables) => {
                out.push_str(&format!("node.{j}.mechanism=sample_path\n"));
                for (t, table) in tables.iter().enumerate() {
                    out.push_str(&format!("node.{j}.table.{t}={}\n", join(table)));
                }
            }
            Mechanism::Cpt(table) => {
                out.push_str(&format!("node.{j}.mechanism=cpt\n"));
                out.push_str(&format!("node.{j}.table={}\n", join(table)));
            }
        }
        match spec.noises[j] {
            NoiseLaw::ScaledPowerGaussian { k, alpha } => {
                out.push_str(&format!("node.{j}.noise=scaled_power_gaussian\n"));
                out.push_str(&format!("node.{j}.noise.k={k}\n"));
                out.push_str(&format!("node.{j}.noise.alpha={alpha}\n"));
            }
            NoiseLaw::Gaussian { variance } => {
                out.push_str(&format!("node.{j}.noise=gaussian\n"));
                out.push_str(&format!("node.{j}.noise.variance={variance}\n"));
            }
            NoiseLaw::Uniform { low, high } => {
                out.push_str(&format!("node.{j}.noise=uniform\n"));
                out.push_str(&format!("node.{j}.noise.low={low}\n"));
                out.push_str(&format!("node.{j}.noise.high={high}\n"));
            }
            NoiseLaw::BernoulliTable => out.push_str(&format!("node.{j}.noise=bernoulli_table\n")),
            NoiseLaw::None => out.push_str(&format!("node.{j}.noise=none\n")),
        }
        let draws = spec.noise_draws.get(j).map(|d| join(d)).unwrap_or_default();
        out.push_str(&format!("node.{j}.noise_draws={draws}\n"));
    }
    out
}

#[allow(clippy::too_many_arguments)]
fn cmd_discover(
    seed: u64,
    data: &std::path::Path,
    method: &str,
    rm: RegressionMethod,
    alpha: f64,
    lambda: f64,
    brute_force_p5: bool,
    out: &std::path::Path,
    diagnostics: Option<&std::path::Path>,
) -> Result<()> {
    let data = Dataset::read_csv(data)?;
    let result: DiscoveryResult = match method {
        "resit" => resit(&data, rm, alpha)?,
        "gds" => gds(&data, rm, lambda, seed)?,
        "brute_force" => {
            brute_force_capped(&data, rm, lambda, if brute_force_p5 { 5 } else { 4 })?
        }
        other => bail!("unknown method {other:?}"),
    };
    fs::write(out, result.graph_text()).with_context(|| format!("writing {}", out.display()))?;
    if let Some(path) = diagnostics {
        fs::write(path, result.diagnostics_text())
            .with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

/// Estimated graphs may be partially directed; the truth must be a DAG.
enum Estimate {
    Dag(Dag),
    Pdag(Pdag),
}

fn cmd_evaluate(
    truth: &std::path::Path,
    est: &std::path::Path,
    metrics: &str,
    out: Option<&std::path::Path>,
) -> Result<()> {
    let truth_text = fs::read_to_string(truth).with_context(|| format!("reading {}", truth.display()))?;
    let est_text = fs::read_to_string(est).with_context(|| format!("reading {}", est.display()))?;
    let t = parse_dag(&truth_text).context("true graph")?;
    let e = match parse_dag(&est_text) {
        Ok(d) => Estimate::Dag(d),
        Err(_) => Estimate::Pdag(parse_pdag(&est_text).context("estimated graph")?),
    };
    let est_pdag = match &e {
        Estimate::Dag(d) => Pdag::from(d),
        Estimate::Pdag(c) => c.clone(),
    };
    let est_cpdag = match &e {
        Estimate::Dag(d) => cpdag(d),
        Estimate::Pdag(c) => c.clone(),
    };
    let mut header = Vec::new();
    let mut row = Vec::new();
    for metric in metrics.split(',').map(str::trim) {
        match metric {
            "shd" => {
                header.push("shd".to_string());
                row.push(shd(&Pdag::from(&t), &est_pdag)?.to_string());
            }
            "shd_cpdag" => {
                header.push("shd_cpdag".to_string());
                row.push(shd(&cpdag(&t), &est_cpdag)?.to_string());
            }
            "sid" => {
                let r = match &e {
                    Estimate::Dag(d) => sid(&t, d)?,
                    Estimate::Pdag(c) => sid_bounds(&t, c)?,
                };
                header.push("sid_lower".to_string());
                header.push("sid_upper".to_string());
                row.push(r.lower.to_string());
                row.push(r.upper.to_string());
            }
            other => bail!("unknown metric {other:?}; expected shd, shd_cpdag or sid"),
        }
    }
    let csv = format!("{}\n{}\n", header.join(","), row.join(","));
    emit(out, &csv)
}

fn cmd_identifiability(triple: &std::path::Path, out: &std::path::Path) -> Result<()> {
    let text = fs::read_to_string(triple).with_context(|| format!("reading {}", triple.display()))?;
    let (f, xi, nu, steps) = parse_triple_file(&text)?;
    let t = AnmTriple::from_families(&f, &xi, &nu)?;
    let grid = central_grid(&t, steps)?;
    let points = ode_residual(&t, &grid)?;
    let mut csv = String::from("x,y,residual\n");
    for pt in &points {
        let r = pt.residual.map(|v| v.to_string()).unwrap_or_default();
        csv.push_str(&format!("{},{},{}\n", pt.x, pt.y, r));
    }
    fs::write(out, csv).with_context(|| format!("writing {}", out.display()))
}

fn parse_triple_file(text: &str) -> Result<(Vec<f64>, Family, Family, usize)> {
    let mut f = None;
    let mut xi = None;
    let mut nu = None;
    let mut steps = 21usize;
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .with_context(|| format!("line {}: expected key=value", idx + 1))?;
        match key.trim() {
            "f" => f = Some(parse_num_list(value)?),
            "xi" => xi = Some(parse_family(value)?),
            "nu" => nu = Some(parse_family(value)?),
            "grid_steps" => steps = value.trim().parse().context("grid_steps")?,
            other => bail!("line {}: unknown key {other:?}", idx + 1),
        }
    }
    Ok((
        f.context("triple file must set f")?,
        xi.context("triple file must set xi")?,
        nu.context("triple file must set nu")?,
        steps,
    ))
}

fn parse_num_list(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|t| t.trim().parse::<f64>().with_context(|| format!("bad number {:?}", t.trim())))
        .collect()
}

fn parse_family(value: &str) -> Result<Family> {
    let (name, params) = value
        .split_once(':')
        .with_context(|| format!("family must be written name: params, got {:?}", value.trim()))?;
    let nums = parse_num_list(params)?;
    match name.trim() {
        "gaussian" => {
            if nums.len() != 2 {
                bail!("gaussian takes mean, variance");
            }
            Ok(Family::Gaussian { mean: nums[0], variance: nums[1] })
        }
        "log-mix-lin-exp" => {
            if nums.len() != 4 {
                bail!("log-mix-lin-exp takes c1, c2, c3, c4");
            }
            Ok(Family::LogMixLinExp { c: [nums[0], nums[1], nums[2], nums[3]] })
        }
        other => bail!("unknown family {other:?}; expected gaussian or log-mix-lin-exp"),
    }
}

fn cmd_pairs(dir: &std::path::Path, rm: RegressionMethod, out: &std::path::Path) -> Result<()> {
    let records = load_pairs(dir)?;
    let curve = rank_and_curve(&records, rm)?;
    let mut csv = String::from("decision_rate,accuracy,ci68_low,ci68_high,ci95_low,ci95_high\n");
    for p in &curve.points {
        csv.push_str(&format!(
            "{},{},{},{},{},{}\n",
            p.decision_rate, p.accuracy, p.ci68_low, p.ci68_high, p.ci95_low, p.ci95_high
        ));
    }
    fs::write(out, csv).with_context(|| format!("writing {}", out.display()))
}

fn cmd_bench(seed: u64, config: &std::path::Path, out_dir: Option<PathBuf>) -> Result<()> {
    let text = fs::read_to_string(config).with_context(|| format!("reading {}", config.display()))?;
    let mut cfg = BenchConfig::from_key_values(&text)?;
    // The global seed applies only when the config file does not pin one.
    if !config_has_key(&text, "seed") {
        cfg.seed = seed;
    }
    if out_dir.is_some() {
        cfg.out_dir = out_dir;
    }
    let report = run_benchmark(&cfg)?;
    let summary = report.summary_csv();
    if let Some(dir) = &cfg.out_dir {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        fs::write(dir.join("replicates.csv"), report.replicates_csv())?;
        fs::write(dir.join("summary.csv"), &summary)?;
    }
    print!("{summary}");
    let frac = report.failure_fraction();
    if frac > 0.05 {
        bail!("{:.1}% of replicates failed", 100.0 * frac);
    }
    Ok(())
}

fn config_has_key(text: &str, key: &str) -> bool {
    text.lines().any(|raw| {
        let line = raw.trim();
        !line.starts_with('#')
            && line.split_once('=').is_some_and(|(k, _)| k.trim() == key)
    })
}

fn emit(out: Option<&std::path::Path>, content: &str) -> Result<()> {
    match out {
        Some(path) => {
            fs::write(path, content).with_context(|| format!("writing {}", path.display()))
        }
        None => {
            print!("{content}");
            Ok(())
        }
    }
}
