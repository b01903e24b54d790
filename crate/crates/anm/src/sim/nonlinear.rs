//! Nonlinear additive SEM: GP sample-path mechanisms, Gaussian noise.

use nalgebra::DMatrix;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::graph::Dag;
use crate::regression::la::factor_spd;
use crate::rng::rng_from_seed;

use super::{Mechanism, NoiseLaw, SemSpec};

#[derive(Clone, Copy, Debug)]
pub struct NonlinearOptions {
    /// Range of the per-node Gaussian noise variance (uniform draw).
    pub variance_range: (f64, f64),
    /// One GP path per parent summed, versus a single joint path over the
    /// parent vector.
    pub additive: bool,
    /// RBF kernel bandwidth of the GP, applied to raw parent values.
    pub bandwidth: f64,
}

impl Default for NonlinearOptions {
    fn default() -> NonlinearOptions {
        NonlinearOptions { variance_range: (0.1, 0.5), additive: true, bandwidth: 1.0 }
    }
}

pub fn sample_nonlinear_sem(g: &Dag, n: usize, seed: u64) -> Result<(Dataset, SemSpec)> {
    sample_nonlinear_sem_with(g, n, seed, &NonlinearOptions::default())
}

/// Mechanisms are zero-mean GP sample paths realized exactly at the sampled
/// parent inputs (no basis approximation), so the additive decomposition
/// column = sum(tables) + noise holds to rounding error.
pub fn sample_nonlinear_sem_with(
    g: &Dag,
    n: usize,
    seed: u64,
    opts: &NonlinearOptions,
) -> Result<(Dataset, SemSpec)> {
    let (lo, hi) = opts.variance_range;
    if !(lo > 0.0 && hi >= lo && hi.is_finite()) {
        return Err(Error::InvalidParam(format!("bad variance range [{lo}, {hi}]")));
    }
    if !(opts.bandwidth > 0.0 && opts.bandwidth.is_finite()) {
        return Err(Error::InvalidParam(format!("bad GP bandwidth {}", opts.bandwidth)));
    }
    if n < 2 {
        return Err(Error::TooFewRows { need: 2, got: n });
    }
    let p = g.p();
    let mut rng = rng_from_seed(seed);
    let mut mechanisms = vec![Mechanism::SamplePath(Vec::new()); p];
    let mut noises = vec![NoiseLaw::None; p];
    let mut noise_draws = vec![Vec::new(); p];
    let mut cols: Vec<Vec<f64>> = vec![Vec::new(); p];

    for &j in g.topological_order().pi() {
        let parents = g.parents_of(j).to_vec();
        let variance = rng.gen_range(lo..=hi);
        let tables: Vec<Vec<f64>> = if parents.is_empty() {
            Vec::new()
        } else if opts.additive {
            parents
                .iter()
                .map(|&k| gp_path(&[&cols[k]], opts.bandwidth, &mut rng))
                .collect::<Result<_>>()?
        } else {
            let inputs: Vec<&[f64]> = parents.iter().map(|&k| cols[k].as_slice()).collect();
            vec![gp_path(&inputs, opts.bandwidth, &mut rng)?]
        };
        let sd = variance.sqrt();
        let noise: Vec<f64> =
            (0..n).map(|_| rng.sample::<f64, _>(StandardNormal) * sd).collect();
        let mut col = noise.clone();
        for t in &tables {
            for (v, f) in col.iter_mut().zip(t) {
                *v += f;
            }
        }
        cols[j] = col;
        mechanisms[j] = Mechanism::SamplePath(tables);
        noises[j] = NoiseLaw::Gaussian { variance };
        noise_draws[j] = noise;
    }

    let data = Dataset::from_columns(cols)?;
    let spec = SemSpec { graph: g.clone(), mechanisms, noises, noise_draws };
    Ok((data, spec))
}

/// Exact draw from a zero-mean GP at the given input rows: factor the RBF
/// gram (escalating jitter for near-duplicate inputs) and push standard
/// normals through the lower-triangular factor.
fn gp_path(coords: &[&[f64]], bandwidth: f64, rng: &mut ChaCha8Rng) -> Result<Vec<f64>> {
    let n = coords[0].len();
    let denom = 2.0 * bandwidth * bandwidth;
    let mut k = DMatrix::<f64>::zeros(n, n);
    for r in 0..n {
        for s in 0..=r {
            let d2: f64 = coords.iter().map(|c| (c[r] - c[s]).powi(2)).sum();
            let v = (-d2 / denom).exp();
            k[(r, s)] = v;
            k[(s, r)] = v;
        }
    }
    let (ch, _) = factor_spd(&k)?;
    let z: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
    let l = ch.l_dirty();
    // Upper triangle of l_dirty is garbage; use rows up to the diagonal.
    Ok((0..n).map(|r| (0..=r).map(|s| l[(r, s)] * z[s]).sum()).collect())
}
