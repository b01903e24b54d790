//! Random DAGs and structural equation model samplers.
//!
//! Graphs draw a uniform node ordering and include each forward pair with a
//! fixed probability. Two data regimes are covered: linear mechanisms with
//! heavy-tailed non-Gaussian noise, and additive nonlinear mechanisms (GP
//! sample paths) with Gaussian noise. A third, fully discrete SEM with binary
//! variables backs the interventional oracle in the metrics module.
//!
//! Every sampler is a pure function of its inputs and a 64-bit seed, and
//! returns the realized [`SemSpec`] alongside the data so tests can check the
//! additive structure exactly.

mod discrete;
mod linear;
mod nonlinear;

pub use discrete::DiscreteSem;
pub use linear::sample_linear_sem;
pub use nonlinear::{sample_nonlinear_sem, sample_nonlinear_sem_with, NonlinearOptions};

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::graph::Dag;
use crate::rng::{derive_seed, rng_from_seed};

/// Structural function of one node.
#[derive(Clone, Debug, PartialEq)]
pub enum Mechanism {
    /// Coefficients aligned with the node's parents in ascending order;
    /// empty for source nodes.
    Linear(Vec<f64>),
    /// Function values realized at the sampled inputs: one table per parent
    /// for additive mechanisms, a single table for a joint mechanism. Sample
    /// paths exist only at the observed points and cannot be re-evaluated.
    SamplePath(Vec<Vec<f64>>),
    /// P(X_j = 1 | parent values) indexed by the parent-configuration
    /// bitmask (ascending parents, bit 0 = smallest parent).
    Cpt(Vec<f64>),
}

/// Noise attached to one node's structural equation.
#[derive(Clone, Debug, PartialEq)]
pub enum NoiseLaw {
    /// K * sign(M) * |M|^alpha with M standard normal.
    ScaledPowerGaussian { k: f64, alpha: f64 },
    Gaussian { variance: f64 },
    Uniform { low: f64, high: f64 },
    /// Randomness lives in the CPT itself; no additive term.
    BernoulliTable,
    None,
}

/// Fully realized SEM: graph, per-node mechanisms and noise laws, and the
/// noise columns that were actually drawn (empty for CPT mechanisms).
#[derive(Clone, Debug, PartialEq)]
pub struct SemSpec {
    pub graph: Dag,
    pub mechanisms: Vec<Mechanism>,
    pub noises: Vec<NoiseLaw>,
    pub noise_draws: Vec<Vec<f64>>,
}

/// Data regime of the benchmark experiments.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Regime {
    LinearNongauss,
    NonlinearGauss,
}

impl Regime {
    pub fn name(self) -> &'static str {
        match self {
            Regime::LinearNongauss => "linear_nongauss",
            Regime::NonlinearGauss => "nonlinear_gauss",
        }
    }

    pub fn parse(s: &str) -> Result<Regime> {
        match s {
            "linear_nongauss" => Ok(Regime::LinearNongauss),
            "nonlinear_gauss" => Ok(Regime::NonlinearGauss),
            other => Err(Error::InvalidParam(format!(
                "unknown regime {other:?}; expected linear_nongauss or nonlinear_gauss"
            ))),
        }
    }
}

/// One simulation request: graph size, sample size, regime, seed, and an
/// optional override of the edge-inclusion probability.
#[derive(Clone, Debug)]
pub struct SimConfig {
    pub p: usize,
    pub n: usize,
    pub regime: Regime,
    pub seed: u64,
    pub edge_prob: Option<f64>,
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.p == 0 {
            return Err(Error::InvalidParam("p must be >= 1".into()));
        }
        if self.n < 2 {
            return Err(Error::TooFewRows { need: 2, got: self.n });
        }
        if let Some(q) = self.edge_prob {
            check_prob(q)?;
        }
        Ok(())
    }
}

fn check_prob(q: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::InvalidParam(format!("edge probability {q} outside [0, 1]")));
    }
    Ok(())
}

/// Random DAG over a uniform node ordering with the default edge-inclusion
/// probability min(2/(p-1), 1), giving p expected edges for large p.
pub fn random_dag(p: usize, seed: u64) -> Result<Dag> {
    let prob = if p >= 2 { (2.0 / (p as f64 - 1.0)).min(1.0) } else { 0.0 };
    random_dag_with_prob(p, prob, seed)
}

/// Random DAG with an explicit edge-inclusion probability.
pub fn random_dag_with_prob(p: usize, prob: f64, seed: u64) -> Result<Dag> {
    check_prob(prob)?;
    let mut rng = rng_from_seed(seed);
    let mut order: Vec<usize> = (0..p).collect();
    order.shuffle(&mut rng);
    let mut edges = Vec::new();
    for a in 0..p {
        for b in a + 1..p {
            if rng.gen::<f64>() < prob {
                edges.push((order[a], order[b]));
            }
        }
    }
    Dag::from_edges(p, &edges)
}

/// Draw a graph and a dataset for one configured replicate. The graph and
/// the SEM consume independent derived seed streams, so changing the regime
/// keeps the graph fixed.
pub fn simulate(cfg: &SimConfig) -> Result<(Dag, Dataset, SemSpec)> {
    cfg.validate()?;
    let graph_seed = derive_seed(cfg.seed, &[1]);
    let g = match cfg.edge_prob {
        Some(q) => random_dag_with_prob(cfg.p, q, graph_seed)?,
        None => random_dag(cfg.p, graph_seed)?,
    };
    let data_seed = derive_seed(cfg.seed, &[2]);
    let (data, spec) = match cfg.regime {
        Regime::LinearNongauss => sample_linear_sem(&g, cfg.n, data_seed)?,
        Regime::NonlinearGauss => sample_nonlinear_sem(&g, cfg.n, data_seed)?,
    };
    Ok((g, data, spec))
}

/// Ancestral sampling from an explicit spec. Supports linear and CPT
/// mechanisms; sample-path mechanisms exist only at their original inputs.
pub fn sample_from_spec(spec: &SemSpec, n: usize, seed: u64) -> Result<Dataset> {
    let p = spec.graph.p();
    if spec.mechanisms.len() != p || spec.noises.len() != p {
        return Err(Error::NodeCountMismatch(spec.mechanisms.len().min(spec.noises.len()), p));
    }
    if n < 2 {
        return Err(Error::TooFewRows { need: 2, got: n });
    }
    let mut rng = rng_from_seed(seed);
    let mut cols: Vec<Vec<f64>> = vec![Vec::new(); p];
    for &j in spec.graph.topological_order().pi() {
        let parents = spec.graph.parents_of(j).to_vec();
        let col = match &spec.mechanisms[j] {
            Mechanism::Linear(coef) => {
                if coef.len() != parents.len() {
                    return Err(Error::InvalidParam(format!(
                        "node {j}: {} coefficients for {} parents",
                        coef.len(),
                        parents.len()
                    )));
                }
                let mut col = draw_noise(&spec.noises[j], n, &mut rng)?;
                for (b, &k) in coef.iter().zip(&parents) {
                    for r in 0..n {
                        col[r] += b * cols[k][r];
                    }
                }
                col
            }
            Mechanism::Cpt(table) => {
                if table.len() != 1usize << parents.len() {
                    return Err(Error::InvalidParam(format!(
                        "node {j}: CPT length {} for {} parents",
                        table.len(),
                        parents.len()
                    )));
                }
                (0..n)
                    .map(|r| {
                        let mut cfg = 0usize;
                        for (pos, &k) in parents.iter().enumerate() {
                            if cols[k][r] != 0.0 {
                                cfg |= 1 << pos;
                            }
                        }
                        f64::from(rng.gen::<f64>() < table[cfg])
                    })
                    .collect()
            }
            Mechanism::SamplePath(_) => {
                return Err(Error::InvalidParam(format!(
                    "node {j}: sample-path mechanisms cannot be re-sampled"
                )))
            }
        };
        cols[j] = col;
    }
    Dataset::from_columns(cols)
}

fn draw_noise(law: &NoiseLaw, n: usize, rng: &mut impl Rng) -> Result<Vec<f64>> {
    let col = match *law {
        NoiseLaw::ScaledPowerGaussian { k, alpha } => (0..n)
            .map(|_| {
                let m: f64 = rng.sample(StandardNormal);
                k * m.signum() * m.abs().powf(alpha)
            })
            .collect(),
        NoiseLaw::Gaussian { variance } => {
            if variance < 0.0 {
                return Err(Error::InvalidParam(format!("negative noise variance {variance}")));
            }
            let sd = variance.sqrt();
            (0..n).map(|_| rng.sample::<f64, _>(StandardNormal) * sd).collect()
        }
        NoiseLaw::Uniform { low, high } => {
            if !(low < high) {
                return Err(Error::InvalidParam(format!("empty uniform range [{low}, {high})")));
            }
            (0..n).map(|_| rng.gen_range(low..high)).collect()
        }
        NoiseLaw::BernoulliTable | NoiseLaw::None => vec![0.0; n],
    };
    Ok(col)
}
