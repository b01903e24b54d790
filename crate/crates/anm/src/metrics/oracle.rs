//! Interventional SID oracle on exact discrete SEMs.

use crate::error::{Error, Result};
use crate::graph::Dag;
use crate::rng::derive_rng;
use crate::sim::DiscreteSem;

use super::SidResult;

const TV_TOL: f64 = 1e-9;
const MAX_ORACLE_P: usize = 6;

/// Brute-force ground truth for [`super::sid`]: draws `trials` random binary
/// SEMs over `g_true`, computes p(x_j | do(x_i)) exactly by truncated
/// factorization, and compares it against the parent-adjusted estimate
/// sum_z p(x_j | x_i, z) p(z) with z ranging over PA_h(i) configurations.
/// A pair is good iff the two agree (total variation <= 1e-9) for both
/// intervention values in every trial.
pub fn sid_oracle(g_true: &Dag, h: &Dag, trials: usize, seed: u64) -> Result<SidResult> {
    if g_true.p() != h.p() {
        return Err(Error::NodeCountMismatch(g_true.p(), h.p()));
    }
    let p = g_true.p();
    if p > MAX_ORACLE_P {
        return Err(Error::ScaleCap { what: "interventional oracle", max: MAX_ORACLE_P, got: p });
    }
    if trials == 0 {
        return Err(Error::InvalidParam("oracle needs at least one trial".into()));
    }
    let states = 1usize << p;
    let mut good = vec![vec![true; p]; p];
    for t in 0..trials {
        let mut rng = derive_rng(seed, &[t as u64]);
        let sem = DiscreteSem::random(g_true, &mut rng);
        let joint = sem.joint()?;
        for i in 0..p {
            let z = h.parents_of(i).to_vec();
            for value in [false, true] {
                let doj = sem.do_joint(i, value)?;
                for j in 0..p {
                    if j == i || !good[i][j] {
                        continue;
                    }
                    let truth: f64 =
                        (0..states).filter(|s| (s >> j) & 1 == 1).map(|s| doj[s]).sum();
                    let est = adjusted_estimate(&joint, p, i, value, j, &z);
                    if (truth - est).abs() > TV_TOL {
                        good[i][j] = false;
                    }
                }
            }
        }
    }
    Ok(SidResult::from_matrix(good))
}

/// sum_z p(x_j = 1 | x_i = value, x_Z = z) p(x_Z = z), all terms exact
/// marginals of the observational joint. CPT entries are interior, so every
/// conditioning event has positive mass.
fn adjusted_estimate(
    joint: &[f64],
    p: usize,
    i: usize,
    value: bool,
    j: usize,
    z: &[usize],
) -> f64 {
    let configs = 1usize << z.len();
    let mut p_z = vec![0.0; configs];
    let mut p_iz = vec![0.0; configs];
    let mut p_jiz = vec![0.0; configs];
    for (s, &mass) in joint.iter().enumerate().take(1usize << p) {
        let cfg =
            z.iter().enumerate().fold(0usize, |acc, (pos, &k)| acc | (((s >> k) & 1) << pos));
        p_z[cfg] += mass;
        if ((s >> i) & 1 == 1) == value {
            p_iz[cfg] += mass;
            if (s >> j) & 1 == 1 {
                p_jiz[cfg] += mass;
            }
        }
    }
    (0..configs).map(|cfg| p_jiz[cfg] / p_iz[cfg] * p_z[cfg]).sum()
}
