//! Linear SEM with heavy-tailed non-Gaussian noise.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::graph::Dag;
use crate::rng::rng_from_seed;

use super::{Mechanism, NoiseLaw, SemSpec};

/// Each edge coefficient is uniform on [-2, -0.1] u [0.1, 2]; node j's noise
/// is K_j sign(M) |M|^alpha_j with M standard normal, K_j ~ U[0.1, 0.5] and
/// alpha_j ~ U[2, 4], which is sub-Gaussian-free: every alpha > 1 makes the
/// law leptokurtic, so no node is Gaussian.
pub fn sample_linear_sem(g: &Dag, n: usize, seed: u64) -> Result<(Dataset, SemSpec)> {
    if n < 2 {
        return Err(Error::TooFewRows { need: 2, got: n });
    }
    let p = g.p();
    let mut rng = rng_from_seed(seed);
    let mut mechanisms = Vec::with_capacity(p);
    let mut noises = Vec::with_capacity(p);
    let mut noise_draws = Vec::with_capacity(p);
    for j in 0..p {
        let coef: Vec<f64> = g
            .parents_of(j)
            .iter()
            .map(|_| {
                let mag = rng.gen_range(0.1..=2.0);
                if rng.gen::<bool>() {
                    mag
                } else {
                    -mag
                }
            })
            .collect();
        let k = rng.gen_range(0.1..=0.5);
        let alpha = rng.gen_range(2.0..=4.0);
        let column: Vec<f64> = (0..n)
            .map(|_| {
                let m: f64 = rng.sample(StandardNormal);
                k * m.signum() * m.abs().powf(alpha)
            })
            .collect();
        mechanisms.push(Mechanism::Linear(coef));
        noises.push(NoiseLaw::ScaledPowerGaussian { k, alpha });
        noise_draws.push(column);
    }

    let mut cols: Vec<Vec<f64>> = noise_draws.clone();
    for &j in g.topological_order().pi() {
        let Mechanism::Linear(coef) = &mechanisms[j] else { unreachable!() };
        let mut col = std::mem::take(&mut cols[j]);
        for (b, k) in coef.iter().zip(g.parents_of(j).iter()) {
            for (v, x) in col.iter_mut().zip(&cols[k]) {
                *v += b * x;
            }
        }
        cols[j] = col;
    }

    let data = Dataset::from_columns(cols)?;
    let spec = SemSpec { graph: g.clone(), mechanisms, noises, noise_draws };
    Ok((data, spec))
}
